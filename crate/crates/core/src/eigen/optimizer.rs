//! BFGS with a strong-Wolfe line search, run from several starting points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum GradientMode {
    /// Two shifted circuit evaluations per parameter; exact for RY/RZ.
    ParameterShift,
    /// Central difference with step `step`.
    FiniteDifference { step: f64 },
    /// Reverse sweep through the circuit; exact, one forward and one backward pass.
    Adjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub gradient: GradientMode,
    /// Stop once the gradient sup-norm falls below this.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 1000,
            gradient: GradientMode::Adjoint,
            tolerance: 1e-6,
            restarts: 5,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restart count must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("optimizer tolerance must be positive".into()));
        }
        if let GradientMode::FiniteDifference { step } = self.gradient {
            if !(step > 0.0) {
                return Err(Error::Config("finite-difference step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one local optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub value: f64,
    pub params: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// SplitMix64 step; gives independent child seeds from one master seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` angles uniform on `[0, 2pi)`.
pub fn uniform_angles(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

fn check_finite(value: f64, x: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numeric {
            message: format!("cost evaluated to {value}"),
            params: x.to_vec(),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Central-difference gradient of a scalar function.
pub fn finite_difference<F>(f: &F, x: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        probe[k] = x[k] + step;
        let up = f(&probe)?;
        probe[k] = x[k] - step;
        let down = f(&probe)?;
        probe[k] = x[k];
        grad.push((up - down) / (2.0 * step));
    }
    Ok(grad)
}

struct Probe {
    alpha: f64,
    value: f64,
    slope: f64,
    x: Vec<f64>,
    grad: Vec<f64>,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_LINE_STEPS: usize = 40;

fn probe<F>(f: &F, x: &[f64], dir: &[f64], alpha: f64) -> Result<Probe>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + ?Sized,
{
    let xa: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + alpha * di).collect();
    let (value, grad) = f(&xa)?;
    check_finite(value, &xa)?;
    Ok(Probe {
        alpha,
        value,
        slope: dot(&grad, dir),
        x: xa,
        grad,
    })
}

/// Minimizer of the cubic through two probes, falling back to bisection.
fn interpolate(lo: &Probe, hi: &Probe) -> f64 {
    let (a, b) = (lo.alpha, hi.alpha);
    let d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
    let disc = d1 * d1 - lo.slope * hi.slope;
    let mid = 0.5 * (a + b);
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
    let (left, right) = if a < b { (a, b) } else { (b, a) };
    let margin = 0.1 * (right - left);
    if t.is_finite() && t > left + margin && t < right - margin {
        t
    } else {
        mid
    }
}

fn line_search<F>(f: &F, x: &[f64], f0: f64, g0: &[f64], dir: &[f64]) -> Result<Option<Probe>>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + ?Sized,
{
    let slope0 = dot(g0, dir);
    if slope0 >= 0.0 {
        return Ok(None);
    }
    let start = Probe {
        alpha: 0.0,
        value: f0,
        slope: slope0,
        x: x.to_vec(),
        grad: g0.to_vec(),
    };
    let mut prev = start;
    let mut alpha = 1.0;
    for step in 0..MAX_LINE_STEPS {
        let cur = probe(f, x, dir, alpha)?;
        if cur.value > f0 + C1 * alpha * slope0 || (step > 0 && cur.value >= prev.value) {
            return zoom(f, x, f0, slope0, dir, prev, cur);
        }
        if cur.slope.abs() <= -C2 * slope0 {
            return Ok(Some(cur));
        }
        if cur.slope >= 0.0 {
            return zoom(f, x, f0, slope0, dir, cur, prev);
        }
        prev = cur;
        alpha *= 2.0;
    }
    Ok(Some(prev).filter(|p| p.alpha > 0.0))
}

fn zoom<F>(
    f: &F,
    x: &[f64],
    f0: f64,
    slope0: f64,
    dir: &[f64],
    mut lo: Probe,
    mut hi: Probe,
) -> Result<Option<Probe>>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + ?Sized,
{
    for _ in 0..MAX_LINE_STEPS {
        let alpha = interpolate(&lo, &hi);
        if (hi.alpha - lo.alpha).abs() < 1e-16 * lo.alpha.abs().max(1.0) {
            break;
        }
        let cur = probe(f, x, dir, alpha)?;
        if cur.value > f0 + C1 * alpha * slope0 || cur.value >= lo.value {
            hi = cur;
        } else {
            if cur.slope.abs() <= -C2 * slope0 {
                return Ok(Some(cur));
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    // Accept the best sufficient-decrease point even without the curvature condition.
    Ok(Some(lo).filter(|p| p.alpha > 0.0 && p.value < f0))
}

/// One BFGS run from `x0` using a value-and-gradient oracle.
pub fn bfgs<F>(f: &F, x0: &[f64], max_iterations: usize, tolerance: f64) -> Result<LocalMinimum>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + ?Sized,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x)?;
    check_finite(fx, &x)?;
    let mut h = identity(n);
    let mut fresh = true;
    let mut iterations = 0;
    while iterations < max_iterations {
        if sup_norm(&g) < tolerance {
            break;
        }
        iterations += 1;
        let dir: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let step = match line_search(f, &x, fx, &g, &dir)? {
            Some(p) => p,
            None if fresh => break,
            None => {
                h = identity(n);
                fresh = true;
                continue;
            }
        };
        let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = step.grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let improvement = fx - step.value;
        x = step.x;
        fx = step.value;
        g = step.grad;
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            bfgs_update(&mut h, &s, &y, sy);
            fresh = false;
        }
        if improvement <= 1e-15 * fx.abs().max(1.0) && sup_norm(&g) < tolerance.sqrt() {
            break;
        }
    }
    let gradient_norm = sup_norm(&g);
    Ok(LocalMinimum {
        value: fx,
        params: x,
        gradient_norm,
        iterations,
        converged: gradient_norm < tolerance,
    })
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

/// `H <- (I - r s y^T) H (I - r y s^T) + r s s^T` with `r = 1 / s.y`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    let coef = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Runs BFGS from every start and returns the lowest result; ties go to the earlier start.
pub fn best_of<F>(
    exec: Exec,
    f: &F,
    starts: &[Vec<f64>],
    max_iterations: usize,
    tolerance: f64,
) -> Result<LocalMinimum>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + Sync + ?Sized,
{
    let runs = par::map_range(exec, starts.len(), |r| {
        bfgs(f, &starts[r], max_iterations, tolerance)
    });
    let mut best: Option<LocalMinimum> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    best.ok_or_else(|| Error::Config("no optimizer starts given".into()))
}

/// Minimize a scalar cost. The first run starts at `init`; further restarts
/// draw uniform angles from the configured seed. Gradients come from central
/// differences (`GradientMode::FiniteDifference`'s step, or `1e-6` otherwise).
pub fn minimize<F>(cost: F, init: &[f64], cfg: &OptimizerConfig) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let step = match cfg.gradient {
        GradientMode::FiniteDifference { step } => step,
        _ => 1e-6,
    };
    let oracle = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let v = check_finite(cost(x)?, x)?;
        Ok((v, finite_difference(&cost, x, step)?))
    };
    let mut starts = vec![init.to_vec()];
    for r in 1..cfg.restarts {
        starts.push(uniform_angles(init.len(), derive_seed(cfg.seed, r as u64)));
    }
    let best = best_of(cfg.exec, &oracle, &starts, cfg.max_iterations, cfg.tolerance)?;
    Ok((best.value, best.params))
}
