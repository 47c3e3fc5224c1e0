//! Small derivative-free optimizers used by the fitting routines.

/// Outcome of a Nelder-Mead run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NmResult {
    pub x: [f64; 2],
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Two-parameter Nelder-Mead simplex search (reflection, expansion,
/// contraction, shrink). `f` should return +inf for out-of-domain points.
pub(crate) fn nelder_mead_2d<F: FnMut(&[f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    step: [f64; 2],
    f_tol: f64,
    max_evals: usize,
) -> NmResult {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut evals = 0;
    let mut eval = |x: &[f64; 2], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    let f0 = eval(&start, &mut evals);
    simplex.push((start, f0));
    for i in 0..2 {
        let mut p = start;
        p[i] += step[i];
        let fp = eval(&p, &mut evals);
        simplex.push((p, fp));
    }

    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[2].1;
        if (worst - best).abs() <= f_tol * (1.0 + best.abs()) {
            converged = true;
            break;
        }

        let centroid = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let reflect = [
            centroid[0] + ALPHA * (centroid[0] - simplex[2].0[0]),
            centroid[1] + ALPHA * (centroid[1] - simplex[2].0[1]),
        ];
        let fr = eval(&reflect, &mut evals);

        if fr < simplex[0].1 {
            let expand = [
                centroid[0] + GAMMA * (reflect[0] - centroid[0]),
                centroid[1] + GAMMA * (reflect[1] - centroid[1]),
            ];
            let fe = eval(&expand, &mut evals);
            simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflect, fr);
        } else {
            let contract = if fr < simplex[2].1 {
                [
                    centroid[0] + RHO * (reflect[0] - centroid[0]),
                    centroid[1] + RHO * (reflect[1] - centroid[1]),
                ]
            } else {
                [
                    centroid[0] + RHO * (simplex[2].0[0] - centroid[0]),
                    centroid[1] + RHO * (simplex[2].0[1] - centroid[1]),
                ]
            };
            let fc = eval(&contract, &mut evals);
            if fc < simplex[2].1.min(fr) {
                simplex[2] = (contract, fc);
            } else {
                // shrink toward the best vertex
                for i in 1..3 {
                    let p = [
                        simplex[0].0[0] + SIGMA * (simplex[i].0[0] - simplex[0].0[0]),
                        simplex[0].0[1] + SIGMA * (simplex[i].0[1] - simplex[0].0[1]),
                    ];
                    let fp = eval(&p, &mut evals);
                    simplex[i] = (p, fp);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    NmResult {
        x: simplex[0].0,
        fx: simplex[0].1,
        evals,
        converged,
    }
}

/// Golden-section minimization on [a, b].
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let r = nelder_mead_2d(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            [0.0, 0.0],
            [0.5, 0.5],
            1e-14,
            500,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.5).abs() < 1e-5 && (r.x[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn handles_infinite_regions() {
        // half-plane barrier, minimum at the feasible optimum
        let r = nelder_mead_2d(
            |x| {
                if x[0] < 0.0 {
                    f64::INFINITY
                } else {
                    (x[0] - 0.2).powi(2) + x[1].powi(2)
                }
            },
            [1.0, 1.0],
            [0.5, 0.5],
            1e-14,
            800,
        );
        assert!((r.x[0] - 0.2).abs() < 1e-4);
    }

    #[test]
    fn golden_section_minimum() {
        let (x, _) = golden_section(|t| (t - 0.7).powi(2), -2.0, 3.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-8);
    }
}
