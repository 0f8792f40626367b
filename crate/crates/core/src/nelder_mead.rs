//! Nelder-Mead downhill simplex minimizer with dimension-adaptive
//! coefficients (Gao & Han, 2012).

use crate::error::Result;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct NelderMead<T> {
    /// Offset of the initial vertices from the start point, per coordinate.
    pub initial_step: T,
    /// Converged once every vertex lies within this max-norm distance of the best one.
    pub x_tol: T,
    /// Objective evaluation budget.
    pub max_evals: usize,
    /// Record the best value after every iteration.
    pub record_history: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evals: usize,
    pub converged: bool,
    pub history: Vec<T>,
}

struct Coefficients<T> {
    reflect: T,
    expand: T,
    contract: T,
    shrink: T,
}

impl<T: Real> Coefficients<T> {
    fn for_dimension(n: usize) -> Self {
        if n < 2 {
            return Self {
                reflect: T::one(),
                expand: lit(2.0),
                contract: lit(0.5),
                shrink: lit(0.5),
            };
        }
        let n = n as f64;
        Self {
            reflect: T::one(),
            expand: lit(1.0 + 2.0 / n),
            contract: lit(0.75 - 0.5 / n),
            shrink: lit(1.0 - 1.0 / n),
        }
    }
}

fn lerp<T: Real>(from: &[T], to: &[T], s: T) -> Vec<T> {
    from.iter()
        .zip(to)
        .map(|(&a, &b)| a + (b - a) * s)
        .collect()
}

impl<T: Real> NelderMead<T> {
    pub fn new(initial_step: T, max_evals: usize) -> Self {
        Self {
            initial_step,
            x_tol: lit(1e-8),
            max_evals,
            record_history: false,
        }
    }

    /// Minimizes `f` from `x0`. The returned point is the best vertex seen,
    /// never worse than `x0`.
    pub fn minimize<F>(&self, mut f: F, x0: &[T]) -> Result<Minimum<T>>
    where
        F: FnMut(&[T]) -> Result<T>,
    {
        let n = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[T], evals: &mut usize| -> Result<T> {
            *evals += 1;
            let v = f(x)?;
            Ok(if v.is_finite() {
                v
            } else {
                T::max_value().unwrap_or(v)
            })
        };

        let f0 = eval(x0, &mut evals)?;
        if n == 0 {
            return Ok(Minimum {
                x: Vec::new(),
                value: f0,
                evals,
                converged: true,
                history: vec![f0],
            });
        }
        let mut simplex: Vec<(Vec<T>, T)> = vec![(x0.to_vec(), f0)];
        for i in 0..n {
            if evals >= self.max_evals {
                break;
            }
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            let fv = eval(&v, &mut evals)?;
            simplex.push((v, fv));
        }
        if simplex.len() < n + 1 {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let (x, value) = simplex.swap_remove(0);
            return Ok(Minimum {
                x,
                value,
                evals,
                converged: false,
                history: vec![value],
            });
        }

        let k = Coefficients::<T>::for_dimension(n);
        let mut history = Vec::new();
        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            if self.record_history {
                history.push(simplex[0].1);
            }
            let spread = simplex[1..].iter().fold(T::zero(), |acc, (v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .fold(acc, |m, (&a, &b)| m.max((a - b).abs()))
            });
            if spread < self.x_tol {
                converged = true;
                break;
            }
            if evals >= self.max_evals {
                break;
            }

            let inv_n: T = T::one() / lit(n as f64);
            let mut centroid = vec![T::zero(); n];
            for (v, _) in &simplex[..n] {
                for (c, &x) in centroid.iter_mut().zip(v) {
                    *c += x * inv_n;
                }
            }
            let (worst, f_worst) = simplex[n].clone();
            let f_best = simplex[0].1;
            let f_second = simplex[n - 1].1;

            let xr = lerp(&centroid, &worst, -k.reflect);
            let fr = eval(&xr, &mut evals)?;
            if fr < f_best {
                let xe = lerp(&centroid, &worst, -k.reflect * k.expand);
                if evals < self.max_evals {
                    let fe = eval(&xe, &mut evals)?;
                    simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                } else {
                    simplex[n] = (xr, fr);
                }
                continue;
            }
            if fr < f_second {
                simplex[n] = (xr, fr);
                continue;
            }
            if evals >= self.max_evals {
                if fr < f_worst {
                    simplex[n] = (xr, fr);
                }
                continue;
            }
            // contraction, outside or inside
            let (xc, fc) = if fr < f_worst {
                let xc = lerp(&centroid, &worst, -k.reflect * k.contract);
                let fc = eval(&xc, &mut evals)?;
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &worst, k.contract);
                let fc = eval(&xc, &mut evals)?;
                (xc, fc)
            };
            if fc < fr.min(f_worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink towards the best vertex
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                if evals >= self.max_evals {
                    break;
                }
                let v = lerp(&best, &vertex.0, k.shrink);
                let fv = eval(&v, &mut evals)?;
                *vertex = (v, fv);
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (x, value) = simplex.swap_remove(0);
        Ok(Minimum {
            x,
            value,
            evals,
            converged,
            history,
        })
    }
}
