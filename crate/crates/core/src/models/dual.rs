use serde::{Deserialize, Serialize};

use super::scorer::{Model, Scorer, ScorerKind};
use crate::data::{DataPoint, PuData};
use crate::error::{invalid, PuError, Result};
use crate::math::{loss_eval, ClassCode, ClassPrior, Kernel, LossKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DualOptions {
    /// Weight of `||w||^2` in the primal, same role as `TrainConfig::lambda`.
    pub lambda: f64,
    pub max_iter: usize,
    /// Largest accepted `n_p + n_u`.
    pub cap: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            lambda: 0.01,
            max_iter: 100_000,
            cap: 200,
        }
    }
}

/// Solution of the PU-SVM dual over unlabeled multipliers `B`, `C`.
///
/// `tau` holds one coefficient per training point, positives first. The
/// decision function is `(1/lambda) * (sum_p 2 tau_p K(x_p, x) + sum_u tau_u K(x_u, x)) - offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub tau: Vec<f64>,
    pub b_mult: Vec<f64>,
    pub c_mult: Vec<f64>,
    pub offset: f64,
    pub objective_value: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub n_pos: usize,
    pub iterations: usize,
}

/// Worst violation of each constraint family at a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    /// `B_i >= 0`, `C_i >= 0`
    pub nonnegativity: f64,
    /// `sum B + 2 sum C = 2 alpha`
    pub equality: f64,
    /// `B_i + C_i <= 1/n_u`
    pub box_bound: f64,
    /// `tau_p = alpha/(2 n_p)` and `tau_u = -B/2 - C`
    pub tau: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.nonnegativity.max(self.equality).max(self.box_bound).max(self.tau)
    }
}

struct Problem {
    n_p: usize,
    n_u: usize,
    alpha: f64,
    lambda: f64,
    /// `K_uu`
    k_uu: Vec<Vec<f64>>,
    /// `(alpha/n_p) sum_p K(x_p, x_u)` per unlabeled point
    pos_u: Vec<f64>,
    /// `(alpha/n_p)^2 sum_{p,q} K(x_p, x_q)`
    pos_pos: f64,
}

impl Problem {
    fn new(data: &PuData, alpha: f64, kernel: Kernel, lambda: f64) -> Self {
        let n_p = data.positive.len();
        let n_u = data.unlabeled.len();
        let wp = alpha / n_p as f64;
        let k_uu = data
            .unlabeled
            .iter()
            .map(|a| data.unlabeled.iter().map(|b| kernel.apply(a, b)).collect())
            .collect();
        let pos_u = data
            .unlabeled
            .iter()
            .map(|u| wp * data.positive.iter().map(|p| kernel.apply(p, u)).sum::<f64>())
            .collect();
        let pos_pos = wp
            * wp
            * data
                .positive
                .iter()
                .map(|a| data.positive.iter().map(|b| kernel.apply(a, b)).sum::<f64>())
                .sum::<f64>();
        Problem {
            n_p,
            n_u,
            alpha,
            lambda,
            k_uu,
            pos_u,
            pos_pos,
        }
    }

    fn upper(&self) -> f64 {
        1.0 / self.n_u as f64
    }

    /// `w . phi(x_u)` for every unlabeled point, with `c = B/2 + C`.
    fn w_phi(&self, c: &[f64]) -> Vec<f64> {
        self.k_uu
            .iter()
            .zip(&self.pos_u)
            .map(|(row, pu)| (pu - dot(row, c)) / self.lambda)
            .collect()
    }

    /// `||v||^2` where `w = v / lambda`.
    fn v_norm2(&self, c: &[f64], w_phi: &[f64]) -> f64 {
        // v.v = pos_pos - 2 c.pos_u + c'Kc, and lambda * w_phi = pos_u - K c
        let kc_dot: f64 = c.iter().zip(w_phi).zip(&self.pos_u).map(|((ci, wp), pu)| ci * (pu - self.lambda * wp)).sum();
        self.pos_pos - 2.0 * dot(c, &self.pos_u) + kc_dot
    }

    fn combined(b: &[f64], c: &[f64]) -> Vec<f64> {
        b.iter().zip(c).map(|(bi, ci)| 0.5 * bi + ci).collect()
    }

    fn dual_value(&self, b: &[f64], c: &[f64]) -> (f64, Vec<f64>) {
        let comb = Self::combined(b, c);
        let w_phi = self.w_phi(&comb);
        let value = b.iter().sum::<f64>() - self.v_norm2(&comb, &w_phi) / self.lambda;
        (value, w_phi)
    }

    /// Projection onto `{B, C >= 0, B + C <= 1/n_u, sum B + 2 sum C = 2 alpha}`.
    fn project(&self, b0: &[f64], c0: &[f64], b: &mut [f64], c: &mut [f64]) {
        let u = self.upper();
        let target = 2.0 * self.alpha;
        let fill = |mu: f64, b: &mut [f64], c: &mut [f64]| -> f64 {
            let mut total = 0.0;
            for i in 0..b0.len() {
                let (x, y) = project_triangle(b0[i] - mu, c0[i] - 2.0 * mu, u);
                b[i] = x;
                c[i] = y;
                total += x + 2.0 * y;
            }
            total
        };
        let spread = b0.iter().chain(c0).fold(0.0f64, |m, v| m.max(v.abs()));
        let mut lo = -(spread + u) - 1.0;
        let mut hi = spread + 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if fill(mid, b, c) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // both ends bracket the target; interpolate inside the final linear piece
        let g_lo = fill(lo, b, c);
        let g_hi = fill(hi, b, c);
        let mu = if g_lo > g_hi {
            lo + (g_lo - target) / (g_lo - g_hi) * (hi - lo)
        } else {
            hi
        };
        fill(mu.clamp(lo, hi), b, c);
    }

    /// Unclamped primal objective at `w` (given through `w . phi(x)` on the
    /// training points) and offset `b`.
    fn primal(&self, v_norm2: f64, w_phi_p: &[f64], w_phi_u: &[f64], offset: f64) -> f64 {
        let wp = self.alpha / self.n_p as f64;
        let wu = 1.0 / self.n_u as f64;
        let reg = v_norm2 / self.lambda;
        let pos: f64 = w_phi_p.iter().map(|&t| -2.0 * (t - offset)).sum::<f64>() * wp;
        let neg: f64 = w_phi_u
            .iter()
            .map(|&t| loss_eval(LossKind::DoubleHinge, ClassCode::Negative, t - offset))
            .sum::<f64>()
            * wu;
        reg + pos + neg
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn clamp_segment(s: f64, u: f64) -> f64 {
    s.clamp(0.0, u)
}

/// Euclidean projection of `(p, q)` onto `{x, y >= 0, x + y <= u}`.
fn project_triangle(p: f64, q: f64, u: f64) -> (f64, f64) {
    if p >= 0.0 && q >= 0.0 && p + q <= u {
        return (p, q);
    }
    let d2 = |x: f64, y: f64| (x - p) * (x - p) + (y - q) * (y - q);
    let on_y = (0.0, clamp_segment(q, u));
    let on_x = (clamp_segment(p, u), 0.0);
    let s = clamp_segment(0.5 * (p - q + u), u);
    let on_diag = (s, u - s);
    let mut best = on_y;
    for cand in [on_x, on_diag] {
        if d2(cand.0, cand.1) < d2(best.0, best.1) {
            best = cand;
        }
    }
    best
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
fn top_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut est = 0.0;
    for _ in 0..200 {
        let y: Vec<f64> = m.iter().map(|row| dot(row, &x)).collect();
        let norm = dot(&y, &y).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        x = y.into_iter().map(|v| v / norm).collect();
        if (next - est).abs() <= 1e-9 * next {
            est = next;
            break;
        }
        est = next;
    }
    est
}

pub fn solve_pu_svm_dual(data: &PuData, alpha: ClassPrior, kernel: Kernel, tolerance: f64) -> Result<DualSolution> {
    solve_pu_svm_dual_with(data, alpha, kernel, tolerance, &DualOptions::default())
}

/// Solves the dual of the unclamped PU-SVM problem with the double hinge loss
/// by accelerated projected gradient ascent over `(B, C)`.
pub fn solve_pu_svm_dual_with(
    data: &PuData,
    alpha: ClassPrior,
    kernel: Kernel,
    tolerance: f64,
    opts: &DualOptions,
) -> Result<DualSolution> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(invalid("tolerance", "must be positive"));
    }
    if !(opts.lambda > 0.0 && opts.lambda.is_finite()) {
        return Err(invalid("lambda", "must be positive"));
    }
    data.require_both()?;
    let n = data.positive.len() + data.unlabeled.len();
    if n > opts.cap {
        return Err(PuError::InstanceTooLarge { n, cap: opts.cap });
    }
    let a = alpha.value();
    let prob = Problem::new(data, a, kernel, opts.lambda);
    let n_u = prob.n_u;
    let u = prob.upper();
    if 2.0 * a > 2.0 * n_u as f64 * u + 1e-12 {
        return Err(PuError::Infeasible("alpha exceeds the total unlabeled box capacity".into()));
    }

    let lip = (2.5 * top_eigenvalue(&prob.k_uu) / opts.lambda).max(1e-12);
    let step = 1.0 / lip;

    let mut b = vec![0.0; n_u];
    let mut c = vec![a / n_u as f64; n_u];
    let (mut value, _) = prob.dual_value(&b, &c);
    let mut yb = b.clone();
    let mut yc = c.clone();
    let mut t = 1.0f64;
    let mut nb = vec![0.0; n_u];
    let mut nc = vec![0.0; n_u];
    let mut gb = vec![0.0; n_u];
    let mut gc = vec![0.0; n_u];
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let w_phi = prob.w_phi(&Problem::combined(&yb, &yc));
        for i in 0..n_u {
            gb[i] = yb[i] + step * (1.0 + w_phi[i]);
            gc[i] = yc[i] + step * 2.0 * w_phi[i];
        }
        prob.project(&gb, &gc, &mut nb, &mut nc);
        let (new_value, _) = prob.dual_value(&nb, &nc);
        if new_value < value {
            if t == 1.0 {
                // a plain gradient step no longer improves
                break;
            }
            // restart momentum from the last iterate
            t = 1.0;
            yb.copy_from_slice(&b);
            yc.copy_from_slice(&c);
            continue;
        }
        let moved = nb
            .iter()
            .zip(&b)
            .chain(nc.iter().zip(&c))
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        for i in 0..n_u {
            yb[i] = nb[i] + beta * (nb[i] - b[i]);
            yc[i] = nc[i] + beta * (nc[i] - c[i]);
        }
        t = t_next;
        let change = new_value - value;
        b.copy_from_slice(&nb);
        c.copy_from_slice(&nc);
        value = new_value;
        if it > 10 && change <= tolerance * value.abs().max(1.0) && moved <= tolerance * u {
            break;
        }
    }

    let comb = Problem::combined(&b, &c);
    let w_phi_u = prob.w_phi(&comb);
    let w_phi_p: Vec<f64> = data
        .positive
        .iter()
        .map(|x| expansion_dot(&prob, data, kernel, &comb, x))
        .collect();
    let v_norm2 = prob.v_norm2(&comb, &w_phi_u);
    let offset = recover_offset(&prob, &b, &c, &w_phi_p, &w_phi_u, v_norm2);

    let mut tau = vec![a / (2.0 * prob.n_p as f64); prob.n_p];
    tau.extend(comb.iter().map(|v| -v));
    Ok(DualSolution {
        tau,
        b_mult: b,
        c_mult: c,
        offset,
        objective_value: value,
        alpha: a,
        lambda: opts.lambda,
        n_pos: prob.n_p,
        iterations,
    })
}

/// `w . phi(x)` with `w = v / lambda`.
fn expansion_dot(prob: &Problem, data: &PuData, kernel: Kernel, comb: &[f64], x: &[f64]) -> f64 {
    let wp = prob.alpha / prob.n_p as f64;
    let pos: f64 = data.positive.iter().map(|p| kernel.apply(p, x)).sum::<f64>() * wp;
    let unl: f64 = data.unlabeled.iter().zip(comb).map(|(u, ci)| ci * kernel.apply(u, x)).sum();
    (pos - unl) / prob.lambda
}

fn recover_offset(prob: &Problem, b: &[f64], c: &[f64], w_phi_p: &[f64], w_phi_u: &[f64], v_norm2: f64) -> f64 {
    let u = prob.upper();
    let delta = 1e-3 * u;
    let mut candidates = Vec::new();
    for i in 0..prob.n_u {
        if b[i] + c[i] < u - delta {
            if b[i] > delta {
                candidates.push(w_phi_u[i] + 1.0);
            } else if c[i] > delta {
                candidates.push(w_phi_u[i]);
            }
        }
    }
    if !candidates.is_empty() {
        candidates.sort_by(f64::total_cmp);
        let m = candidates.len();
        return if m % 2 == 1 {
            candidates[m / 2]
        } else {
            0.5 * (candidates[m / 2 - 1] + candidates[m / 2])
        };
    }
    let (lo, hi) = w_phi_u
        .iter()
        .chain(w_phi_p)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    golden_section(|off| prob.primal(v_norm2, w_phi_p, w_phi_u, off), lo - 2.0, hi + 2.0)
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

impl DualSolution {
    fn check_data(&self, data: &PuData) -> Result<()> {
        if data.positive.len() != self.n_pos || data.unlabeled.len() != self.b_mult.len() {
            return Err(invalid("data", "does not match the solution's training set"));
        }
        Ok(())
    }

    /// Expansion coefficients on the training points, positives first.
    fn coefficients(&self) -> Vec<f64> {
        self.tau
            .iter()
            .enumerate()
            .map(|(i, t)| if i < self.n_pos { 2.0 * t } else { *t } / self.lambda)
            .collect()
    }

    pub fn constraint_residuals(&self) -> ConstraintResiduals {
        let n_u = self.b_mult.len();
        let u = 1.0 / n_u as f64;
        let nonnegativity = self
            .b_mult
            .iter()
            .chain(&self.c_mult)
            .fold(0.0f64, |m, v| m.max(-v));
        let equality = (self.b_mult.iter().sum::<f64>() + 2.0 * self.c_mult.iter().sum::<f64>() - 2.0 * self.alpha).abs();
        let box_bound = self
            .b_mult
            .iter()
            .zip(&self.c_mult)
            .fold(0.0f64, |m, (b, c)| m.max(b + c - u));
        let tp = self.alpha / (2.0 * self.n_pos as f64);
        let mut tau = self.tau[..self.n_pos].iter().fold(0.0f64, |m, t| m.max((t - tp).abs()));
        for ((t, b), c) in self.tau[self.n_pos..].iter().zip(&self.b_mult).zip(&self.c_mult) {
            tau = tau.max((t + 0.5 * b + c).abs());
        }
        ConstraintResiduals {
            nonnegativity,
            equality,
            box_bound,
            tau,
        }
    }

    /// Margins `w . phi(x_i) - offset` on the training points, positives first,
    /// computed from the Gram matrix.
    pub fn margins(&self, data: &PuData, kernel: Kernel) -> Result<Vec<f64>> {
        self.check_data(data)?;
        let coef = self.coefficients();
        let points: Vec<&DataPoint> = data.positive.iter().chain(&data.unlabeled).collect();
        Ok(points
            .iter()
            .map(|x| {
                points
                    .iter()
                    .zip(&coef)
                    .map(|(z, a)| a * kernel.apply(z, x))
                    .sum::<f64>()
                    - self.offset
            })
            .collect())
    }

    /// Unclamped primal objective at the `(w, b)` implied by this solution.
    pub fn primal_objective(&self, data: &PuData, kernel: Kernel) -> Result<f64> {
        self.check_data(data)?;
        let prob = Problem::new(data, self.alpha, kernel, self.lambda);
        let comb: Vec<f64> = self.tau[self.n_pos..].iter().map(|t| -t).collect();
        let w_phi_u = prob.w_phi(&comb);
        let w_phi_p: Vec<f64> = data
            .positive
            .iter()
            .map(|x| expansion_dot(&prob, data, kernel, &comb, x))
            .collect();
        let v_norm2 = prob.v_norm2(&comb, &w_phi_u);
        Ok(prob.primal(v_norm2, &w_phi_p, &w_phi_u, self.offset))
    }

    pub fn to_scorer(&self, data: &PuData, kernel: Kernel) -> Result<Scorer> {
        self.check_data(data)?;
        let centers = data
            .positive
            .iter()
            .chain(&data.unlabeled)
            .map(|p| p.to_vec())
            .collect();
        let model = Model::Expansion {
            kernel,
            centers,
            coef: self.coefficients(),
            offset: self.offset,
        };
        Ok(Scorer::new(ScorerKind::PuSvmDual, model, None, data.dim))
    }
}

/// Decision value of the dual solution at `x`.
pub fn dual_score(sol: &DualSolution, data: &PuData, kernel: Kernel, x: &[f64]) -> Result<f64> {
    sol.check_data(data)?;
    if x.len() != data.dim {
        return Err(PuError::DimensionMismatch {
            expected: data.dim,
            got: x.len(),
        });
    }
    let coef = sol.coefficients();
    Ok(data
        .positive
        .iter()
        .chain(&data.unlabeled)
        .zip(&coef)
        .map(|(z, a)| a * kernel.apply(z, x))
        .sum::<f64>()
        - sol.offset)
}
