//! Torus critical points of f_X: the closed-form symmetric points, damped
//! Newton refinement, and seeded random probing for unexpected points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{Derivatives, LaurentError};
use crate::model::CiModel;
use crate::numeric::{self, ComplexBig, DecimalComplex, Precision};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("symmetric point r={branch} failed its residual check ({residual})")]
    ResidualCheck { branch: u32, residual: String },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Numeric thresholds. Defaults are tuned for 256-bit working precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max |df/dz_i| for a point to count as critical.
    pub residual: f64,
    /// Critical values below `value_rel * (1 + i_X d^{1/i_X})` are near zero.
    pub value_rel: f64,
    /// Max-norm coordinate distance under which two points are the same.
    pub dedup: f64,
    /// Relative error allowed when matching critical values to predictions.
    pub value_match: f64,
    /// Singular values below this fraction of the largest count as zero.
    pub rank_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-30,
            value_rel: 1e-10,
            dedup: 1e-20,
            value_match: 1e-20,
            rank_threshold: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn value_tolerance(&self, model: &CiModel, prec: Precision) -> Float {
        let alpha = numeric::real_root(model.dconst(), model.index(), prec);
        let scale = alpha * model.index() + 1u32;
        scale * numeric::float(prec, self.value_rel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NonzeroValue,
    NearZeroValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointRecord {
    pub coordinates: Vec<ComplexBig>,
    pub value: ComplexBig,
    pub branch: Option<u32>,
    pub residual: Float,
    pub classification: Classification,
}

impl CriticalPointRecord {
    fn new(coordinates: Vec<ComplexBig>, value: ComplexBig, residual: Float, value_tol: &Float) -> Self {
        let classification = if numeric::abs(&value) > *value_tol {
            Classification::NonzeroValue
        } else {
            Classification::NearZeroValue
        };
        CriticalPointRecord {
            coordinates,
            value,
            branch: None,
            residual,
            classification,
        }
    }

    pub fn to_json(&self, digits: usize) -> CriticalPointJson {
        CriticalPointJson {
            coordinates: self.coordinates.iter().map(|z| DecimalComplex::new(z, digits)).collect(),
            value: DecimalComplex::new(&self.value, digits),
            residual: numeric::decimal(&self.residual, 6),
            branch: self.branch,
            classification: self.classification,
        }
    }

    /// Max-norm distance between coordinate vectors.
    pub fn max_distance(&self, other: &Self) -> Float {
        let bits = self.value.prec().0;
        self.coordinates
            .iter()
            .zip(&other.coordinates)
            .map(|(a, b)| numeric::abs(&Complex::with_val(bits, a - b)))
            .fold(Float::new(bits), |acc, x| if x > acc { x } else { acc })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointJson {
    pub coordinates: Vec<DecimalComplex>,
    pub value: DecimalComplex,
    pub residual: String,
    pub branch: Option<u32>,
    pub classification: Classification,
}

/// The i_X points with all x = 1 and all y = exp(2 pi i r / i_X) d^{1/i_X}.
pub fn symmetric_critical_points(
    model: &CiModel,
    prec: Precision,
    tol: &Tolerances,
) -> Result<Vec<CriticalPointRecord>, CriticalError> {
    let f = Derivatives::new(&model.build_givental());
    let alpha = numeric::real_root(model.dconst(), model.index(), prec);
    let residual_tol = numeric::float(prec, tol.residual);
    let value_tol = tol.value_tolerance(model, prec);
    let y_block = model.y_block();
    (0..model.index())
        .map(|r| {
            let y = numeric::root_of_unity(r, model.index(), prec) * &alpha;
            let coords: Vec<ComplexBig> = (0..model.dim() as usize)
                .map(|v| {
                    if y_block.contains(&v) {
                        y.clone()
                    } else {
                        numeric::complex(prec, 1.0, 0.0)
                    }
                })
                .collect();
            let (value, grad, _) = f.all_at(&coords, prec)?;
            let residual = numeric::max_abs(&grad, prec);
            if residual >= residual_tol {
                return Err(CriticalError::ResidualCheck {
                    branch: r,
                    residual: numeric::decimal(&residual, 6),
                });
            }
            let mut rec = CriticalPointRecord::new(coords, value, residual, &value_tol);
            rec.branch = Some(r);
            Ok(rec)
        })
        .collect()
}

/// Residuals of the scalar critical-point system in the chart y_0 = 1,
/// x = 1, y_s = y:  F = 0, dF/dy_s = 0 and dF/dy_0 = 0 reduce to
/// d = (lambda - (i_X - 1) y) y^{i_X-1}, lambda = i_X y, d i_X = lambda y^{i_X-1}.
pub fn scalar_system_residuals(model: &CiModel, y: &ComplexBig, lambda: &ComplexBig) -> [Float; 3] {
    let bits = y.prec().0;
    let ix = model.index();
    let d = Complex::with_val(bits, model.dconst());
    let ypow = Complex::with_val(bits, y.clone().pow(ix - 1));
    let shifted = Complex::with_val(bits, lambda - Complex::with_val(bits, y * (ix - 1)));
    let e1 = Complex::with_val(bits, &d - Complex::with_val(bits, &shifted * &ypow));
    let e2 = Complex::with_val(bits, lambda - Complex::with_val(bits, y * ix));
    let e3 = Complex::with_val(bits, Complex::with_val(bits, &d * ix) - Complex::with_val(bits, lambda * &ypow));
    [numeric::abs(&e1), numeric::abs(&e2), numeric::abs(&e3)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub seed: u64,
    pub trials: usize,
    pub precision: Precision,
    pub newton_max_iter: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub tolerances: Tolerances,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            seed: 42,
            trials: 200,
            precision: Precision::default(),
            newton_max_iter: 200,
            r_min: 0.2,
            r_max: 5.0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonFailure {
    /// The Hessian was numerically singular at an iterate.
    SingularJacobian { iteration: usize },
    /// No damped step decreased the residual.
    Diverged { iteration: usize },
    /// Every candidate step left the region where coordinates stay bounded away from 0 and infinity.
    LeftTorus { iteration: usize },
    MaxIterations,
}

// Iterates with a coordinate modulus outside [1e-12, 1e12] are treated as escaping the torus.
const COORD_FLOOR: f64 = 1e-12;
const COORD_CEIL: f64 = 1e12;

fn in_torus(z: &[ComplexBig]) -> bool {
    z.iter().all(|c| {
        let a = numeric::abs(c);
        a > COORD_FLOOR && a < COORD_CEIL
    })
}

/// Step rule for [`newton_refine_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Plain Newton: H delta = -g.
    Newton,
    /// Regularized: (H^H H + mu I) delta = -H^H g with mu = |g|.
    MarquardtLinear,
    /// Regularized with mu = |g|^2.
    MarquardtQuadratic,
}

fn step_direction(
    hess: &[Vec<ComplexBig>],
    grad: &[ComplexBig],
    rule: StepRule,
    singular_tol: &Float,
) -> Option<Vec<ComplexBig>> {
    let bits = grad[0].prec().0;
    let n = grad.len();
    let neg_g: Vec<ComplexBig> = grad.iter().map(|g| Complex::with_val(bits, -g)).collect();
    let mu = match rule {
        StepRule::Newton => return numeric::solve_complex(hess.to_vec(), neg_g, singular_tol),
        StepRule::MarquardtLinear => numeric::norm2(grad),
        StepRule::MarquardtQuadratic => Float::with_val(bits, numeric::norm2(grad).square_ref()),
    };
    let mut normal = vec![vec![Complex::new(bits); n]; n];
    let mut rhs = vec![Complex::new(bits); n];
    for i in 0..n {
        for k in 0..n {
            let hki = Complex::with_val(bits, hess[k][i].conj_ref());
            for j in 0..n {
                normal[i][j] += Complex::with_val(bits, &hki * &hess[k][j]);
            }
            rhs[i] += Complex::with_val(bits, &hki * &neg_g[k]);
        }
        normal[i][i] += &mu;
    }
    numeric::solve_complex(normal, rhs, singular_tol)
}

/// Newton iteration on grad f = 0 with the Hessian as Jacobian, damped by
/// step halving so that |grad f| decreases monotonically. The reported
/// residual is max |df/dz_i|.
///
/// Steps are Levenberg-Marquardt regularized with mu = |grad f|^2. At a
/// nondegenerate critical point mu vanishes quadratically with the residual,
/// so the iteration keeps Newton's quadratic convergence; near a
/// positive-dimensional critical locus (central fiber) the regularization
/// damps the near-null tangential directions along which plain Newton drifts.
pub fn newton_refine(
    f: &Derivatives,
    start: &[ComplexBig],
    config: &ProbeConfig,
    value_tol: &Float,
) -> Result<CriticalPointRecord, NewtonFailure> {
    newton_refine_with(f, start, config, value_tol, StepRule::MarquardtQuadratic)
}

// Extra iterations taken after the residual tolerance is met.
const POLISH_STEPS: usize = 4;

pub fn newton_refine_with(
    f: &Derivatives,
    start: &[ComplexBig],
    config: &ProbeConfig,
    value_tol: &Float,
    rule: StepRule,
) -> Result<CriticalPointRecord, NewtonFailure> {
    let prec = config.precision;
    let bits = prec.bits();
    let residual_tol = numeric::float(prec, config.tolerances.residual);
    let singular_tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 32));
    let mut z: Vec<ComplexBig> = start.iter().map(|c| Complex::with_val(bits, c)).collect();
    let eval = |z: &[ComplexBig]| f.all_at(z, prec).ok();
    let Some((mut value, mut grad, mut hess)) = eval(&z) else {
        return Err(NewtonFailure::LeftTorus { iteration: 0 });
    };
    let mut residual = numeric::max_abs(&grad, prec);
    let mut merit = numeric::norm2(&grad);
    let mut polish = 0;
    for iteration in 0..config.newton_max_iter + POLISH_STEPS {
        let converged = residual < residual_tol;
        if converged {
            if polish == POLISH_STEPS || residual.is_zero() {
                break;
            }
            polish += 1;
        } else if iteration >= config.newton_max_iter {
            break;
        }
        let Some(delta) = step_direction(&hess, &grad, rule, &singular_tol) else {
            if converged {
                break;
            }
            return Err(NewtonFailure::SingularJacobian { iteration });
        };
        let mut step = Float::with_val(bits, 1);
        let mut accepted = false;
        let mut any_in_torus = false;
        for _ in 0..40 {
            let cand: Vec<ComplexBig> = z
                .iter()
                .zip(&delta)
                .map(|(a, d)| Complex::with_val(bits, a + Complex::with_val(bits, d * &step)))
                .collect();
            if in_torus(&cand) {
                any_in_torus = true;
                if let Some((v, g, h)) = eval(&cand) {
                    let m = numeric::norm2(&g);
                    if m < merit {
                        residual = numeric::max_abs(&g, prec);
                        merit = m;
                        z = cand;
                        value = v;
                        grad = g;
                        hess = h;
                        accepted = true;
                        break;
                    }
                }
            }
            if converged {
                // polishing takes only full steps
                break;
            }
            step /= 2u32;
        }
        if !accepted {
            if converged {
                break;
            }
            return Err(if any_in_torus {
                NewtonFailure::Diverged { iteration }
            } else {
                NewtonFailure::LeftTorus { iteration }
            });
        }
    }
    if residual < residual_tol {
        Ok(CriticalPointRecord::new(z, value, residual, value_tol))
    } else {
        Err(NewtonFailure::MaxIterations)
    }
}

/// Start point for a trial; a pure function of (seed, trial index).
pub fn probe_start(config: &ProbeConfig, nvars: usize, trial: u64) -> Vec<ComplexBig> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let (lo, hi) = (config.r_min.ln(), config.r_max.ln());
    (0..nvars)
        .map(|_| {
            let modulus = rng.gen_range(lo..hi).exp();
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            numeric::complex(config.precision, modulus * theta.cos(), modulus * theta.sin())
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeStats {
    pub trials: usize,
    pub converged: usize,
    pub singular: usize,
    pub diverged: usize,
    pub left_torus: usize,
    pub max_iterations: usize,
    pub distinct_points: usize,
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub points: Vec<CriticalPointRecord>,
    pub stats: ProbeStats,
}

/// Newton from `trials` seeded starts, deduplicated in trial order. Runs on
/// the current rayon pool; output does not depend on its size.
pub fn probe_random(model: &CiModel, config: &ProbeConfig) -> ProbeResult {
    let f = Derivatives::new(&model.build_givental());
    let value_tol = config.tolerances.value_tolerance(model, config.precision);
    let n = model.dim() as usize;
    let outcomes: Vec<Result<CriticalPointRecord, NewtonFailure>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| newton_refine(&f, &probe_start(config, n, t), config, &value_tol))
        .collect();
    let dedup = numeric::float(config.precision, config.tolerances.dedup);
    let mut stats = ProbeStats {
        trials: config.trials,
        ..Default::default()
    };
    let mut points: Vec<CriticalPointRecord> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(rec) => {
                stats.converged += 1;
                if !points.iter().any(|p| p.max_distance(&rec) < dedup) {
                    points.push(rec);
                }
            }
            Err(NewtonFailure::SingularJacobian { .. }) => stats.singular += 1,
            Err(NewtonFailure::Diverged { .. }) => stats.diverged += 1,
            Err(NewtonFailure::LeftTorus { .. }) => stats.left_torus += 1,
            Err(NewtonFailure::MaxIterations) => stats.max_iterations += 1,
        }
    }
    stats.distinct_points = points.len();
    ProbeResult { points, stats }
}

#[derive(Debug, Clone, Default)]
pub struct Partition {
    /// Sorted by the argument of the value, in [0, 2 pi).
    pub nonzero: Vec<CriticalPointRecord>,
    pub near_zero: Vec<CriticalPointRecord>,
}

pub fn classify(points: &[CriticalPointRecord], value_tol: &Float) -> Partition {
    let mut part = Partition::default();
    for p in points {
        if numeric::abs(&p.value) > *value_tol {
            part.nonzero.push(p.clone());
        } else {
            part.near_zero.push(p.clone());
        }
    }
    if let Some(first) = part.nonzero.first() {
        let snap = Float::with_val(first.value.prec().0, Float::i_exp(1, -100));
        part.nonzero
            .sort_by(|a, b| numeric::cmp_float(&numeric::arg_key(&a.value, &snap), &numeric::arg_key(&b.value, &snap)));
    }
    part
}

/// Label each nonzero-value record with the branch r whose predicted value
/// it matches within the relative tolerance.
pub fn assign_branches(model: &CiModel, points: &mut [CriticalPointRecord], prec: Precision, tol: &Tolerances) {
    let expected = model.expected_critical_values(prec);
    let rel = numeric::float(prec, tol.value_match);
    for p in points.iter_mut() {
        if p.classification != Classification::NonzeroValue {
            continue;
        }
        p.branch = expected.iter().position(|e| {
            let err = numeric::abs(&Complex::with_val(prec.bits(), &p.value - e));
            err <= Float::with_val(prec.bits(), numeric::abs(e) * &rel)
        }).map(|r| r as u32);
    }
}

/// Default linkage radius for grouping near-zero points into clusters.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 0.25;

/// Number of single-linkage clusters of `points` at max-norm `radius`.
pub fn cluster_count(points: &[CriticalPointRecord], radius: f64) -> usize {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].max_distance(&points[j]) < radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    fn m(s: &str) -> CiModel {
        s.parse().unwrap()
    }

    fn prec() -> Precision {
        Precision::default()
    }

    fn close(a: &ComplexBig, re: f64, im: f64, eps: f64) -> bool {
        let b = numeric::complex(prec(), re, im);
        numeric::abs(&Complex::with_val(256, a - &b)) < eps
    }

    #[test]
    fn symmetric_points_projective_line() {
        let pts = symmetric_critical_points(&m("@1"), prec(), &Tolerances::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(close(&pts[0].coordinates[0], 1.0, 0.0, 1e-70));
        assert!(close(&pts[0].value, 2.0, 0.0, 1e-70));
        assert!(close(&pts[1].coordinates[0], -1.0, 0.0, 1e-70));
        assert!(close(&pts[1].value, -2.0, 0.0, 1e-70));
    }

    #[test]
    fn symmetric_points_quadric_and_cubic_surface() {
        let pts = symmetric_critical_points(&m("2@3"), prec(), &Tolerances::default()).unwrap();
        assert!(close(&pts[0].coordinates[0], 1.0, 0.0, 1e-70));
        assert!(close(&pts[0].coordinates[1], 2.0, 0.0, 1e-70));
        assert!(close(&pts[0].value, 4.0, 0.0, 1e-70));
        assert!(close(&pts[1].coordinates[1], -2.0, 0.0, 1e-70));
        assert!(close(&pts[1].value, -4.0, 0.0, 1e-70));

        let pts = symmetric_critical_points(&m("3@3"), prec(), &Tolerances::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(close(&pts[0].value, 27.0, 0.0, 1e-70));
        assert_eq!(pts[0].branch, Some(0));
        assert_eq!(pts[0].classification, Classification::NonzeroValue);
    }

    #[test]
    fn scalar_system_holds_at_symmetric_points() {
        let tol = prec().half_tolerance();
        for s in ["@1", "@2", "@3", "2@3", "2@4", "3@3", "3@4", "4@4", "2,2@5", "2,3@5"] {
            let model = m(s);
            let pts = symmetric_critical_points(&model, prec(), &Tolerances::default()).unwrap();
            let alpha = numeric::real_root(model.dconst(), model.index(), prec());
            for p in &pts {
                let r = p.branch.unwrap();
                let y = numeric::root_of_unity(r, model.index(), prec()) * &alpha;
                for e in scalar_system_residuals(&model, &y, &p.value) {
                    assert!(e < tol, "{s} r={r}");
                }
            }
        }
    }

    #[test]
    fn literal_f_equation_needs_the_y_factor() {
        // d = (lambda - i_X + 1) y^{i_X - 1} read literally fails for the
        // quadric surface: (4 - 1) * 2 = 6 != 4.
        let model = m("2@3");
        let (y, lambda) = (numeric::complex(prec(), 2.0, 0.0), numeric::complex(prec(), 4.0, 0.0));
        let literal = Complex::with_val(256, &lambda - 1u32) * &y;
        assert!(!close(&literal, 4.0, 0.0, 1e-3));
        assert!(scalar_system_residuals(&model, &y, &lambda).iter().all(|e| e.is_zero()));
    }

    #[test]
    fn newton_on_x_plus_inverse() {
        let f = LaurentPoly::from_terms(
            vec!["x".into()],
            [(vec![1], 1.into()), (vec![-1], 1.into())],
        )
        .unwrap();
        let d = Derivatives::new(&f);
        let cfg = ProbeConfig::default();
        let vt = numeric::float(prec(), 1e-10);
        let rec = newton_refine(&d, &[numeric::complex(prec(), 1.1, 0.0)], &cfg, &vt).unwrap();
        assert!(close(&rec.coordinates[0], 1.0, 0.0, 1e-60));
        assert!(close(&rec.value, 2.0, 0.0, 1e-60));
    }

    #[test]
    fn newton_on_quadric_surface() {
        let model = m("2@3");
        let d = Derivatives::new(&model.build_givental());
        let cfg = ProbeConfig::default();
        let vt = cfg.tolerances.value_tolerance(&model, prec());
        let start = [numeric::complex(prec(), 1.05, 0.0), numeric::complex(prec(), 1.9, 0.0)];
        let rec = newton_refine(&d, &start, &cfg, &vt).unwrap();
        assert!(close(&rec.coordinates[0], 1.0, 0.0, 1e-60));
        assert!(close(&rec.coordinates[1], 2.0, 0.0, 1e-60));
        assert!(close(&rec.value, 4.0, 0.0, 1e-60));
    }

    #[test]
    fn newton_finds_central_locus_of_cubic_surface() {
        // f = (x1 + x2 + 1)^3 / (x1 x2): on x1 + x2 + 1 = 0 both f and grad f
        // vanish, since grad f is a multiple of (x1 + x2 + 1)^2.
        let model = m("3@3");
        let d = Derivatives::new(&model.build_givental());
        let cfg = ProbeConfig::default();
        let vt = cfg.tolerances.value_tolerance(&model, prec());
        let start = [numeric::complex(prec(), 0.52, 0.3), numeric::complex(prec(), -1.5, -0.31)];
        let rec = newton_refine(&d, &start, &cfg, &vt).unwrap();
        assert_eq!(rec.classification, Classification::NearZeroValue);
        let s = Complex::with_val(256, &rec.coordinates[0] + &rec.coordinates[1]) + 1u32;
        assert!(numeric::abs(&Complex::with_val(256, s)) < 1e-9);
    }

    #[test]
    fn probe_projective_line_finds_both_points() {
        let model = m("@1");
        let cfg = ProbeConfig { trials: 50, ..Default::default() };
        let res = probe_random(&model, &cfg);
        assert_eq!(res.points.len(), 2);
        let vt = cfg.tolerances.value_tolerance(&model, prec());
        let part = classify(&res.points, &vt);
        assert!(close(&part.nonzero[0].value, 2.0, 0.0, 1e-60));
        assert!(close(&part.nonzero[1].value, -2.0, 0.0, 1e-60));
        assert!(part.near_zero.is_empty());
    }

    #[test]
    fn probe_quadric_surface() {
        let model = m("2@3");
        let cfg = ProbeConfig::default();
        let res = probe_random(&model, &cfg);
        let vt = cfg.tolerances.value_tolerance(&model, prec());
        let part = classify(&res.points, &vt);
        assert_eq!(part.nonzero.len(), 2);
        assert!(close(&part.nonzero[0].value, 4.0, 0.0, 1e-60));
        assert!(close(&part.nonzero[1].value, -4.0, 0.0, 1e-60));
        assert!(part.near_zero.is_empty());
    }

    #[test]
    fn probe_cubic_surface() {
        let model = m("3@3");
        let cfg = ProbeConfig::default();
        let res = probe_random(&model, &cfg);
        let vt = cfg.tolerances.value_tolerance(&model, prec());
        let part = classify(&res.points, &vt);
        assert_eq!(part.nonzero.len(), 1);
        assert!(close(&part.nonzero[0].value, 27.0, 0.0, 1e-60));
        assert!(!part.near_zero.is_empty());
        for p in &part.near_zero {
            let s = Complex::with_val(256, &p.coordinates[0] + &p.coordinates[1]) + 1u32;
            assert!(numeric::abs(&Complex::with_val(256, s)) < 1e-9);
        }
    }

    #[test]
    fn classify_projective_plane_sorts_by_argument() {
        let model = m("@2");
        let pts = symmetric_critical_points(&model, prec(), &Tolerances::default()).unwrap();
        let mut shuffled = pts.clone();
        shuffled.reverse();
        let part = classify(&shuffled, &Tolerances::default().value_tolerance(&model, prec()));
        let values: Vec<_> = part.nonzero.iter().map(|p| p.branch).collect();
        assert_eq!(values, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn probe_is_deterministic_across_pool_sizes() {
        let model = m("2@3");
        let cfg = ProbeConfig { trials: 40, ..Default::default() };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| probe_random(&model, &cfg))
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn clusters_by_single_linkage() {
        let rec = |x: f64| CriticalPointRecord {
            coordinates: vec![numeric::complex(prec(), x, 0.0)],
            value: numeric::complex(prec(), 0.0, 0.0),
            branch: None,
            residual: Float::new(256),
            classification: Classification::NearZeroValue,
        };
        let pts: Vec<_> = [0.0, 0.2, 0.4, 2.0, 2.1].iter().map(|&x| rec(x)).collect();
        assert_eq!(cluster_count(&pts, 0.25), 2);
        assert_eq!(cluster_count(&pts, 0.15), 4);
        assert_eq!(cluster_count(&[], 0.25), 0);
    }
}
