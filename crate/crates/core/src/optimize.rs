//! Derivative-free maximisation over a box.
//!
//! Nelder-Mead with every trial point projected onto the box. A projected
//! simplex can flatten against a face, so a converged run is restarted from
//! its best vertex with a fresh simplex until a restart no longer improves.

/// Stopping rules for [`maximize_in_box`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Iteration cap per restart.
    pub max_iter: usize,
    /// Converged when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Edge length of a fresh simplex.
    pub initial_step: f64,
    pub max_restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            f_tol: 1e-13,
            x_tol: 1e-9,
            initial_step: 0.25,
            max_restarts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxOptimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(*lo, *hi);
    }
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (a - b)
    a.iter().zip(b).map(|(ai, bi)| ai + t * (ai - bi)).collect()
}

struct Run<'f, F> {
    f: &'f F,
    lower: &'f [f64],
    upper: &'f [f64],
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64> Run<'_, F> {
    fn eval(&mut self, mut x: Vec<f64>) -> (Vec<f64>, f64) {
        project(&mut x, self.lower, self.upper);
        self.evaluations += 1;
        let v = (self.f)(&x);
        // Minimise the negated objective; NaN counts as worst.
        let v = if v.is_nan() { f64::INFINITY } else { -v };
        (x, v)
    }

    fn simplex_around(&mut self, start: &[f64], step: f64) -> Vec<(Vec<f64>, f64)> {
        let mut pts = vec![self.eval(start.to_vec())];
        for j in 0..start.len() {
            let mut x = start.to_vec();
            let room_up = self.upper[j] - x[j];
            let room_down = x[j] - self.lower[j];
            x[j] += if room_up >= room_down {
                step.min(room_up)
            } else {
                -step.min(room_down)
            };
            pts.push(self.eval(x));
        }
        pts
    }

    /// One Nelder-Mead descent; returns whether it met the tolerances.
    fn descend(&mut self, simplex: &mut [(Vec<f64>, f64)], opts: &NelderMeadOptions) -> bool {
        let n = simplex.len() - 1;
        for _ in 0..opts.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let spread = simplex
                .iter()
                .skip(1)
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (worst - best).abs() <= opts.f_tol && spread <= opts.x_tol {
                return true;
            }
            if spread == 0.0 {
                // Every vertex projected onto the same point.
                return true;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let (reflected, fr) = self.eval(combine(&centroid, &simplex[n].0, 1.0));
            if fr < simplex[0].1 {
                let (expanded, fe) = self.eval(combine(&centroid, &simplex[n].0, 2.0));
                simplex[n] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < simplex[n].1 {
                self.eval(combine(&centroid, &simplex[n].0, 0.5))
            } else {
                self.eval(combine(&centroid, &simplex[n].0, -0.5))
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let shrunk: Vec<f64> = anchor
                    .iter()
                    .zip(&vertex.0)
                    .map(|(a, v)| a + 0.5 * (v - a))
                    .collect();
                *vertex = self.eval(shrunk);
            }
        }
        false
    }
}

/// Maximises `f` over the box `[lower, upper]` starting from `start`.
///
/// The returned value is never worse than the value at the projected start.
pub fn maximize_in_box<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> BoxOptimum {
    assert_eq!(start.len(), lower.len());
    assert_eq!(start.len(), upper.len());
    let mut run = Run {
        f,
        lower,
        upper,
        evaluations: 0,
    };
    if start.is_empty() {
        let (x, v) = run.eval(Vec::new());
        return BoxOptimum {
            x,
            value: -v,
            converged: true,
            evaluations: run.evaluations,
        };
    }

    let mut x0 = start.to_vec();
    project(&mut x0, lower, upper);
    let mut simplex = run.simplex_around(&x0, opts.initial_step);
    let mut converged = run.descend(&mut simplex, opts);
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut best = simplex[0].clone();

    let mut step = opts.initial_step;
    for _ in 0..opts.max_restarts {
        step *= 0.5;
        let mut fresh = run.simplex_around(&best.0, step);
        let ok = run.descend(&mut fresh, opts);
        fresh.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = fresh[0].1 < best.1 - opts.f_tol;
        if fresh[0].1 < best.1 {
            best = fresh[0].clone();
        }
        converged = converged || ok;
        if !improved && ok {
            converged = true;
            break;
        }
    }
    BoxOptimum {
        x: best.0,
        value: -best.1,
        converged,
        evaluations: run.evaluations,
    }
}
