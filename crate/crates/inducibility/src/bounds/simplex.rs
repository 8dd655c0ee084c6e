//! Deterministic derivative-free maximization over the probability simplex
//! `{x : x_i >= 0, Σ x_i = 1, x_i < 1}`, used as a heuristic for suprema
//! with no closed form. Multi-start Nelder-Mead in the first `d-1`
//! coordinates; all starts are generated from a seeded RNG plus fixed
//! corner paths, so identical options give identical results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NumericOptions;

const CORNER_EPSILONS: [f64; 3] = [1e-2, 1e-4, 1e-6];

/// Returns the best `(value, point)` found; the point lives on the full
/// d-dimensional simplex.
pub fn maximize_on_simplex<F>(f: F, dim: usize, opts: &NumericOptions) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    assert!(dim >= 2);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(vec![1.0 / dim as f64; dim]);
    for heavy in 0..dim {
        for &eps in &CORNER_EPSILONS {
            let mut x = vec![eps; dim];
            x[heavy] = 1.0 - (dim as f64 - 1.0) * eps;
            starts.push(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.starts {
        // Exponential spacings normalise to a uniform point on the simplex.
        let raw: Vec<f64> = (0..dim).map(|_| -f64::ln(1.0 - rng.gen::<f64>())).collect();
        let sum: f64 = raw.iter().sum();
        starts.push(raw.iter().map(|v| v / sum).collect());
    }

    let objective = |y: &[f64]| -> f64 {
        let mut x = Vec::with_capacity(dim);
        let mut sum = 0.0;
        for &v in y {
            x.push(v);
            sum += v;
        }
        x.push(1.0 - sum);
        if x.iter().any(|&v| !(0.0..1.0).contains(&v)) {
            return f64::NEG_INFINITY;
        }
        f(&x)
    };

    let mut best_value = f64::NEG_INFINITY;
    let mut best_point = vec![1.0 / dim as f64; dim];
    for start in &starts {
        let y0: Vec<f64> = start[..dim - 1].to_vec();
        let (value, y) = nelder_mead_max(&objective, &y0, opts);
        if value > best_value {
            best_value = value;
            let mut x = y.clone();
            x.push(1.0 - y.iter().sum::<f64>());
            best_point = x;
        }
    }
    (best_value, best_point)
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) maximizing `f` from `y0`.
fn nelder_mead_max<F>(f: &F, y0: &[f64], opts: &NumericOptions) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let n = y0.len();
    let step = 0.05;
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((f(y0), y0.to_vec()));
    for i in 0..n {
        let mut v = y0.to_vec();
        // Step towards the interior when the positive step leaves the simplex.
        v[i] += step;
        if f(&v) == f64::NEG_INFINITY {
            v[i] -= 2.0 * step;
            if v[i] < 0.0 {
                v[i] = y0[i] / 2.0;
            }
        }
        simplex.push((f(&v), v));
    }

    for _ in 0..opts.max_iterations {
        simplex.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[0].0 - simplex[n].0;
        if spread.abs() < opts.tolerance * 1e-3 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(_, v)| v[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|i| centroid[i] + (centroid[i] - worst.1[i]))
            .collect();
        let fr = f(&reflect);
        if fr > simplex[0].0 {
            let expand: Vec<f64> = (0..n)
                .map(|i| centroid[i] + 2.0 * (centroid[i] - worst.1[i]))
                .collect();
            let fe = f(&expand);
            simplex[n] = if fe > fr { (fe, expand) } else { (fr, reflect) };
        } else if fr > simplex[n - 1].0 {
            simplex[n] = (fr, reflect);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|i| centroid[i] - 0.5 * (centroid[i] - worst.1[i]))
                .collect();
            let fc = f(&contract);
            if fc > worst.0 {
                simplex[n] = (fc, contract);
            } else {
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|i| best[i] + 0.5 * (entry.1[i] - best[i]))
                        .collect();
                    *entry = (f(&shrunk), shrunk);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}

/// Visits every grid point with denominator `steps` on the simplex except
/// the corners (where some coordinate equals 1).
pub fn grid_scan<F>(dim: usize, steps: u64, mut visit: F)
where
    F: FnMut(&[f64]),
{
    let mut parts = vec![0u64; dim];
    scan_rec(dim, steps, 0, steps, &mut parts, &mut visit);
}

fn scan_rec<F>(dim: usize, steps: u64, pos: usize, remaining: u64, parts: &mut [u64], visit: &mut F)
where
    F: FnMut(&[f64]),
{
    if pos == dim - 1 {
        parts[pos] = remaining;
        if parts.iter().all(|&p| p < steps) {
            let x: Vec<f64> = parts.iter().map(|&p| p as f64 / steps as f64).collect();
            visit(&x);
        }
        return;
    }
    for p in 0..=remaining {
        parts[pos] = p;
        scan_rec(dim, steps, pos + 1, remaining - p, parts, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        // x₁x₂ on the 2-simplex peaks at the uniform point with value 1/4.
        let (value, point) = maximize_on_simplex(|x| x[0] * x[1], 2, &NumericOptions::default());
        assert!((value - 0.25).abs() < 1e-9);
        assert!((point[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn deterministic_across_runs() {
        let opts = NumericOptions {
            seed: 7,
            ..NumericOptions::default()
        };
        let f = |x: &[f64]| x[0] * x[1] * x[1] * x[2];
        let a = maximize_on_simplex(f, 3, &opts);
        let b = maximize_on_simplex(f, 3, &opts);
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn grid_skips_corners() {
        let mut count = 0usize;
        let mut corner_seen = false;
        grid_scan(2, 10, |x| {
            count += 1;
            if x.iter().any(|&v| v >= 1.0) {
                corner_seen = true;
            }
        });
        assert_eq!(count, 9);
        assert!(!corner_seen);
    }
}
