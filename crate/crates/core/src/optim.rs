//! One-dimensional bounded optimizers.
//!
//! Everything here maximizes (or minimizes) a scalar function on a closed
//! interval. The golden-section search assumes unimodality; the grid-refine
//! and genetic variants trade evaluations for robustness against local
//! optima and are deterministic for a fixed seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol` (or after 200 shrink
/// steps). Returns `(argmax, max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
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
    (x, f(x))
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_section_max(|z| -f(z), lo, hi, tol);
    (x, -neg)
}

/// Iteratively refined grid search for the maximum of `f` on `[lo, hi]`.
///
/// Each level evaluates 33 equally spaced points and re-grids on the two
/// cells around the best one, so multimodal functions are handled as long
/// as the global peak is wider than the coarsest cell. Returns
/// `(argmax, max)` once the grid spans less than `tol`.
pub fn grid_refine_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const N: usize = 33;
    let mut a = lo;
    let mut b = hi;
    let mut best = (lo, f(lo));
    for _ in 0..64 {
        let step = (b - a) / (N - 1) as f64;
        let mut level_best = (a, f64::NEG_INFINITY);
        for i in 0..N {
            let x = a + step * i as f64;
            let fx = f(x);
            if fx > level_best.1 {
                level_best = (x, fx);
            }
            if fx > best.1 {
                best = (x, fx);
            }
        }
        if (b - a).abs() <= tol {
            break;
        }
        a = (level_best.0 - step).max(lo);
        b = (level_best.0 + step).min(hi);
    }
    best
}

/// Options for [`genetic_max`].
#[derive(Debug, Clone, Copy)]
pub struct GeneticOptions {
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
}

impl Default for GeneticOptions {
    fn default() -> Self {
        Self {
            population: 32,
            generations: 100,
            seed: 0,
        }
    }
}

/// Real-coded genetic search for the maximum of `f` on `[lo, hi]`.
///
/// Tournament selection, blend crossover, and Gaussian mutation with a
/// decaying step; fully deterministic for a given seed. Overkill for smooth
/// unimodal objectives but a useful cross-check against the bracketing
/// methods on rugged ones.
pub fn genetic_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: GeneticOptions) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.population.max(4);
    let span = hi - lo;
    let mut pop: Vec<f64> = (0..n).map(|_| lo + span * rng.gen::<f64>()).collect();
    let mut fit: Vec<f64> = pop.iter().map(|&x| f(x)).collect();

    let mut best = (pop[0], fit[0]);
    for (&x, &fx) in pop.iter().zip(fit.iter()) {
        if fx > best.1 {
            best = (x, fx);
        }
    }

    for gen in 0..opts.generations {
        let sigma = 0.3 * span * (1.0 - gen as f64 / opts.generations as f64).max(0.02);
        let mut next = Vec::with_capacity(n);
        // Elitism: carry the champion forward unchanged.
        next.push(best.0);
        while next.len() < n {
            let pick = |rng: &mut ChaCha8Rng| {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if fit[i] >= fit[j] { pop[i] } else { pop[j] }
            };
            let pa = pick(&mut rng);
            let pb = pick(&mut rng);
            let t: f64 = rng.gen();
            let mut child = pa + t * (pb - pa);
            if rng.gen::<f64>() < 0.5 {
                let u: f64 = rng.gen();
                let v: f64 = rng.gen();
                // Box-Muller; cheap and avoids pulling in a distribution type.
                let normal =
                    (-2.0 * u.max(1e-300).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
                child += sigma * normal;
            }
            next.push(child.clamp(lo, hi));
        }
        pop = next;
        fit = pop.iter().map(|&x| f(x)).collect();
        for (&x, &fx) in pop.iter().zip(fit.iter()) {
            if fx > best.1 {
                best = (x, fx);
            }
        }
    }
    best
}
