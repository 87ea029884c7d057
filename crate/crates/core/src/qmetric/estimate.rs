use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{ball_table, seminorm_upper_best, FilteredVector};
use crate::groups::{Ball, GroupModel};
use crate::linop::{op_norm, NormOptions, TriTable};
use crate::par;
use crate::qmetric::{state_eval, StateSpec};
use crate::util::{self, C64};

/// Two starts agreeing with the best to `AGREEMENT * tol` relative mark an
/// estimate as converged.
pub const AGREEMENT: f64 = 1e3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricOptions {
    pub tol: f64,
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
    /// Growth constant used for the certified denominator.
    pub c: Option<f64>,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            tol: 1e-6,
            starts: 20,
            iters: 400,
            seed: util::DEFAULT_SEED,
            c: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// `sum |a(x)| |x|`, valid for every model.
    WeightedL1,
    /// The smaller of the weighted l1 bound and the growth-constant bound.
    Growth,
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricEstimate {
    pub k: usize,
    pub r: usize,
    pub tol: f64,
    pub seed: u64,
    pub starts: usize,
    pub iterations: usize,
    /// Best value of `Re(mu(a) - nu(a))` found with `L_R(a) <= 1`.
    pub upper_estimate: f64,
    /// `|mu(a) - nu(a)|` divided by a rigorous upper bound of `L(a)`.
    pub certified_lower: f64,
    pub denominator: Denominator,
    /// `L_R` of the witness.
    pub witness_seminorm: f64,
    /// The two best starts agree to `AGREEMENT * tol` relative.
    pub converged: bool,
    #[serde(skip)]
    pub witness: FilteredVector,
}

/// Self-adjoint elements of `A_K` with vanishing identity coefficient,
/// parametrized by real coordinates.
struct Problem {
    symbols: Ball,
    table: TriTable,
    /// Each real coordinate as a sparse vector over `B_K`.
    params: Vec<Vec<(usize, C64)>>,
    objective: Vec<f64>,
    norm: NormOptions,
}

impl Problem {
    fn new(model: &GroupModel, mu: &StateSpec, nu: &StateSpec, k: usize, r: usize, tol: f64) -> Result<Self> {
        let symbols = Ball::new(model, k)?;
        let ball = Ball::new(model, r)?;
        let table = ball_table(model, &symbols, &ball, |dx, dz| dx as f64 - dz as f64)?;
        let mut params = vec![];
        for p in 1..symbols.len() {
            let x = symbols.element(p);
            let d = symbols.degree_of(p);
            let q = symbols.locate_in(&model.invert(x), d, d).expect("inverse has the same length");
            let one = C64::new(1.0, 0.0);
            let i = C64::new(0.0, 1.0);
            match p.cmp(&q) {
                std::cmp::Ordering::Less => {
                    params.push(vec![(p, one), (q, one)]);
                    params.push(vec![(p, i), (q, -i)]);
                }
                std::cmp::Ordering::Equal => params.push(vec![(p, one)]),
                std::cmp::Ordering::Greater => {}
            }
        }
        let objective = params
            .iter()
            .map(|b| {
                let mut coeffs = vec![C64::new(0.0, 0.0); symbols.len()];
                for &(y, c) in b {
                    coeffs[y] = c;
                }
                let f = FilteredVector::from_ball_coefficients(model, &symbols, &coeffs)?;
                Ok((state_eval(model, mu, &f)? - state_eval(model, nu, &f)?).re)
            })
            .collect::<Result<Vec<_>>>()?;
        let norm = NormOptions { tol: (tol * 1e-3).max(1e-13), ..NormOptions::default() };
        Ok(Problem { symbols, table, params, objective, norm })
    }

    fn coeffs(&self, theta: &[f64]) -> Vec<C64> {
        let mut f = vec![C64::new(0.0, 0.0); self.symbols.len()];
        for (b, t) in self.params.iter().zip(theta) {
            for &(y, c) in b {
                f[y] += c * t;
            }
        }
        f
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.objective.iter().zip(theta).map(|(a, b)| a * b).sum()
    }

    /// `L_R(theta)` and a subgradient from the singular pair.
    fn seminorm(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let m = self.table.block(&self.coeffs(theta))?;
        let est = op_norm(&m, self.norm)?;
        let g = self.table.symbol_gradient(&est.right, &est.left);
        let s = self
            .params
            .iter()
            .map(|b| b.iter().map(|&(y, c)| (c * g[y]).re).sum())
            .collect();
        Ok((est.value, s))
    }

    /// Ascent of `value / L_R` from `theta`, staying on `L_R = 1`.
    fn climb(&self, mut theta: Vec<f64>, iters: usize) -> Result<(f64, Vec<f64>, usize)> {
        let mut best = (f64::NEG_INFINITY, theta.clone());
        let mut done = 0;
        for t in 1..=iters {
            done = t;
            let (l, s) = self.seminorm(&theta)?;
            if l == 0.0 {
                break;
            }
            theta.iter_mut().for_each(|x| *x /= l);
            let r = self.value(&theta);
            if r > best.0 {
                best = (r, theta.clone());
            }
            let d: Vec<f64> = self.objective.iter().zip(&s).map(|(a, b)| a - r * b).collect();
            let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if dn == 0.0 {
                break;
            }
            let size = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
            let step = 0.5 * size / (t as f64).sqrt() / dn;
            theta.iter_mut().zip(&d).for_each(|(x, dx)| *x += step * dx);
        }
        Ok((best.0, best.1, done))
    }
}

/// Estimates the truncated distance between `mu` and `nu`: the supremum of
/// `Re(mu(a) - nu(a))` over self-adjoint `a` supported on `B_K` with
/// `a(e) = 0` and `|[D_R, a]| <= 1`.
pub fn metric_estimate(
    model: &GroupModel,
    mu: &StateSpec,
    nu: &StateSpec,
    k: usize,
    r: usize,
    opts: MetricOptions,
) -> Result<MetricEstimate> {
    if k == 0 || r < k {
        return Err(Error::InvalidParameter(format!("need 1 <= K <= R, got K={k}, R={r}")));
    }
    if !(opts.tol > 0.0) || opts.starts == 0 || opts.iters == 0 {
        return Err(Error::InvalidParameter("tol, starts and iters must be positive".into()));
    }
    if let Some(c) = opts.c {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("growth constant must be positive, got {c}")));
        }
    }
    mu.validate(model)?;
    nu.validate(model)?;
    // Evaluate in a canonical order so that swapping the states only flips
    // the witness sign.
    let key = |s: &StateSpec| serde_json::to_string(s).expect("serializable");
    let flip = key(mu) > key(nu);
    let (first, second) = if flip { (nu, mu) } else { (mu, nu) };
    let problem = Problem::new(model, first, second, k, r, opts.tol)?;
    let zero = |converged| -> Result<MetricEstimate> {
        Ok(MetricEstimate {
            k,
            r,
            tol: opts.tol,
            seed: opts.seed,
            starts: opts.starts,
            iterations: 0,
            upper_estimate: 0.0,
            certified_lower: 0.0,
            denominator: if opts.c.is_some() { Denominator::Growth } else { Denominator::WeightedL1 },
            witness_seminorm: 0.0,
            converged,
            witness: FilteredVector::zero(model)?,
        })
    };
    if problem.objective.iter().all(|&x| x == 0.0) {
        return zero(true);
    }
    let dim = problem.params.len();
    let runs = par::map_range(opts.starts, |s| {
        let theta = if s == 0 {
            problem.objective.clone()
        } else {
            let mut rng = util::rng(opts.seed, s as u64);
            (0..dim).map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)).collect()
        };
        problem.climb(theta, opts.iters)
    });
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut values = vec![];
    let mut iterations = 0;
    for run in runs {
        let (v, theta, it) = run?;
        iterations += it;
        values.push(v);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, theta));
        }
    }
    let (value, theta) = best.expect("at least one start");
    values.sort_by(|a, b| b.total_cmp(a));
    let converged = values.len() > 1 && values[0] - values[1] <= AGREEMENT * opts.tol * values[0].abs();
    if value <= 0.0 {
        return zero(false);
    }
    let sign = if flip { -1.0 } else { 1.0 };
    let coeffs: Vec<C64> = problem.coeffs(&theta).into_iter().map(|c| c * sign).collect();
    let witness = FilteredVector::from_ball_coefficients(model, &problem.symbols, &coeffs)?;
    let gap = (state_eval(model, mu, &witness)? - state_eval(model, nu, &witness)?).norm();
    let denominator = seminorm_upper_best(&witness, opts.c)?;
    let witness_seminorm = problem.seminorm(&theta)?.0;
    Ok(MetricEstimate {
        k,
        r,
        tol: opts.tol,
        seed: opts.seed,
        starts: opts.starts,
        iterations,
        upper_estimate: value,
        certified_lower: gap / denominator,
        denominator: if opts.c.is_some() { Denominator::Growth } else { Denominator::WeightedL1 },
        witness_seminorm,
        converged,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricTable {
    pub k: usize,
    pub r: usize,
    pub tol: f64,
    pub states: Vec<StateSpec>,
    pub upper: Vec<Vec<f64>>,
    pub certified: Vec<Vec<f64>>,
    pub max_diagonal: f64,
    pub max_asymmetry: f64,
    /// Largest `d(i,k) - d(i,j) - d(j,k)`.
    pub max_triangle_excess: f64,
    pub diagonal_ok: bool,
    pub symmetric_ok: bool,
    pub triangle_ok: bool,
}

/// Pairwise estimates with the metric axioms checked on the upper estimates.
pub fn metric_table(model: &GroupModel, states: &[StateSpec], k: usize, r: usize, opts: MetricOptions) -> Result<MetricTable> {
    let n = states.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let results = par::map_slice(&pairs, |&(i, j)| metric_estimate(model, &states[i], &states[j], k, r, opts));
    let mut upper = vec![vec![0.0; n]; n];
    let mut certified = vec![vec![0.0; n]; n];
    for (&(i, j), e) in pairs.iter().zip(results) {
        let e = e?;
        upper[i][j] = e.upper_estimate;
        certified[i][j] = e.certified_lower;
    }
    let max_diagonal = (0..n).map(|i| upper[i][i].abs()).fold(0.0, f64::max);
    let max_asymmetry = pairs.iter().map(|&(i, j)| (upper[i][j] - upper[j][i]).abs()).fold(0.0, f64::max);
    let mut max_triangle_excess = f64::NEG_INFINITY;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                max_triangle_excess = max_triangle_excess.max(upper[a][c] - upper[a][b] - upper[b][c]);
            }
        }
    }
    Ok(MetricTable {
        k,
        r,
        tol: opts.tol,
        states: states.to_vec(),
        diagonal_ok: max_diagonal <= opts.tol,
        symmetric_ok: max_asymmetry <= 2.0 * opts.tol,
        triangle_ok: max_triangle_excess <= 3.0 * opts.tol,
        upper,
        certified,
        max_diagonal,
        max_asymmetry,
        max_triangle_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, Element};

    fn setup() -> (GroupModel, StateSpec) {
        let z = make_model("zd(1)".parse().unwrap()).unwrap();
        let one = C64::new(1.0, 0.0);
        let xi = StateSpec::vector_from_terms(&z, &[(Element(vec![0]), one), (Element(vec![1]), one)]).unwrap();
        (z, xi)
    }

    fn quick() -> MetricOptions {
        MetricOptions { starts: 6, iters: 150, ..MetricOptions::default() }
    }

    #[test]
    fn same_state_is_zero() {
        let (z, xi) = setup();
        let e = metric_estimate(&z, &xi, &xi, 2, 6, quick()).unwrap();
        assert_eq!(e.upper_estimate, 0.0);
        assert!(e.witness.is_zero());
    }

    #[test]
    fn swap_is_exact() {
        let (z, xi) = setup();
        let a = metric_estimate(&z, &StateSpec::Trace, &xi, 2, 6, quick()).unwrap();
        let b = metric_estimate(&z, &xi, &StateSpec::Trace, 2, 6, quick()).unwrap();
        assert_eq!(a.upper_estimate, b.upper_estimate);
        assert_eq!(a.certified_lower, b.certified_lower);
    }

    #[test]
    fn witness_is_feasible() {
        let (z, xi) = setup();
        let e = metric_estimate(&z, &StateSpec::Trace, &xi, 2, 6, quick()).unwrap();
        let w = &e.witness;
        assert!(w.is_self_adjoint(&z, 0.0).unwrap());
        assert_eq!(w.component(0).unwrap()[0], C64::new(0.0, 0.0));
        assert!(e.witness_seminorm <= 1.0 + e.tol);
        let tail: f64 = w.component_norms().iter().enumerate().map(|(n, a)| (n as f64 * a).powi(2)).sum();
        assert!(tail <= (1.0 + e.tol).powi(2));
        assert!(e.certified_lower > 0.0 && e.certified_lower <= e.upper_estimate + e.tol);
    }

    #[test]
    fn growth_constant_is_used_and_validated() {
        let (z, xi) = setup();
        let opts = MetricOptions { c: Some(1.0), ..quick() };
        let e = metric_estimate(&z, &StateSpec::Trace, &xi, 2, 6, opts).unwrap();
        assert_eq!(e.denominator, Denominator::Growth);
        assert!(e.certified_lower <= e.upper_estimate + e.tol);
        let bad = MetricOptions { c: Some(-1.0), ..quick() };
        assert!(metric_estimate(&z, &StateSpec::Trace, &xi, 2, 6, bad).is_err());
        assert!(metric_estimate(&z, &StateSpec::Trace, &xi, 3, 2, quick()).is_err());
    }

    #[test]
    fn single_state_table() {
        let (z, xi) = setup();
        let t = metric_table(&z, &[xi], 2, 4, quick()).unwrap();
        assert_eq!(t.upper, vec![vec![0.0]]);
        assert!(t.diagonal_ok && t.symmetric_ok && t.triangle_ok);
    }
}
