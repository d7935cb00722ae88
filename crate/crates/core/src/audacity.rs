//! Audacity strategies: how far to expand a result list, learned from the
//! user's past satisfaction.
//!
//! * **PNF** nudges the previous audacity up or down by how far the last
//!   satisfaction was from one half.
//! * **2-LSE** fits a least-squares parabola of satisfaction against
//!   audacity over the whole history and takes its maximum on `[0, 1]`.
//! * **WS** blends the two with a weight `gamma`, either constant or
//!   decaying with the query index.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::model::{check_unit, PastQuery};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Pnf,
    Lse2,
    Ws,
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pnf" => Ok(StrategyKind::Pnf),
            "2-lse" | "lse2" | "2lse" => Ok(StrategyKind::Lse2),
            "ws" => Ok(StrategyKind::Ws),
            other => Err(invalid(format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Pnf => "pnf",
            StrategyKind::Lse2 => "2-lse",
            StrategyKind::Ws => "ws",
        })
    }
}

/// Weight given to PNF by the WS strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaSchedule {
    Constant(f64),
    /// `max(0, 1 - (k - 1) / 25)`
    Decaying,
}

impl GammaSchedule {
    pub fn gamma(&self, k: usize) -> f64 {
        match *self {
            GammaSchedule::Constant(g) => g,
            GammaSchedule::Decaying => gamma_decaying(k),
        }
    }
}

/// Strategy selection plus its tunable constants.
#[derive(Clone, Debug, PartialEq)]
pub struct AudacityStrategy {
    pub kind: StrategyKind,
    /// Initial audacity for PNF.
    pub pnf_alpha0: f64,
    /// Audacities for the first three queries under 2-LSE.
    pub lse_alphas: [f64; 3],
    pub gamma: GammaSchedule,
    /// Fixed audacity chosen by the user; bypasses the strategy.
    pub manual_override: Option<f64>,
}

impl Default for AudacityStrategy {
    fn default() -> Self {
        AudacityStrategy {
            kind: StrategyKind::Ws,
            pnf_alpha0: 0.55,
            lse_alphas: [0.5, 0.6, 0.4],
            gamma: GammaSchedule::Decaying,
            manual_override: None,
        }
    }
}

impl AudacityStrategy {
    pub fn of_kind(kind: StrategyKind) -> Self {
        AudacityStrategy {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("strategy.pnf_alpha0", self.pnf_alpha0)?;
        for a in self.lse_alphas {
            check_unit("strategy.lse_alphas", a)?;
        }
        if let GammaSchedule::Constant(g) = self.gamma {
            check_unit("strategy.gamma.constant", g)?;
        }
        if let Some(a) = self.manual_override {
            check_unit("strategy.manual_override", a)?;
        }
        Ok(())
    }

    /// Applies one `strategy.*` configuration key. Returns `Ok(false)` when
    /// the key is not a strategy key.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<bool> {
        let unit = |v: &str| -> Result<f64> {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("{key}: `{v}` is not a number")))?;
            check_unit(key, x)?;
            Ok(x)
        };
        match key {
            "strategy.kind" => self.kind = value.parse()?,
            "strategy.pnf_alpha0" => self.pnf_alpha0 = unit(value)?,
            "strategy.lse_alphas" => {
                let vals = value.split(',').map(unit).collect::<Result<Vec<_>>>()?;
                self.lse_alphas = vals
                    .try_into()
                    .map_err(|_| invalid(format!("{key}: expected three values")))?;
            }
            "strategy.gamma.mode" => {
                self.gamma = match value.trim() {
                    "decaying" => GammaSchedule::Decaying,
                    "constant" => match self.gamma {
                        GammaSchedule::Constant(g) => GammaSchedule::Constant(g),
                        GammaSchedule::Decaying => GammaSchedule::Constant(0.5),
                    },
                    other => return Err(invalid(format!("{key}: unknown mode `{other}`"))),
                }
            }
            "strategy.gamma.constant" => self.gamma = GammaSchedule::Constant(unit(value)?),
            "strategy.manual_override" => {
                self.manual_override = match value.trim() {
                    "" | "none" => None,
                    v => Some(unit(v)?),
                }
            }
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// PNF: the first query uses `alpha0`; afterwards the last audacity moves by
/// `sigma - 1/2`, clamped to `[0, 1]`.
pub fn pnf_alpha(history: &[PastQuery], alpha0: f64) -> f64 {
    let Some(last) = history.last() else {
        return alpha0;
    };
    if last.sigma > 0.5 {
        (last.alpha + (last.sigma - 0.5)).min(1.0)
    } else if last.sigma < 0.5 {
        (last.alpha - (0.5 - last.sigma)).max(0.0)
    } else {
        last.alpha
    }
}

/// Least-squares parabola `a0*x^2 + a1*x + a2` and its residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParabolaFit {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub residual: f64,
}

impl ParabolaFit {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a0 * x + self.a1) * x + self.a2
    }

    /// Sum of squared errors of `(a0, a1, a2)` over the points.
    pub fn residual_of(coeffs: [f64; 3], xs: &[f64], ys: &[f64]) -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let f = (coeffs[0] * x + coeffs[1]) * x + coeffs[2];
                (y - f) * (y - f)
            })
            .sum()
    }
}

fn distinct_count(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Solves a 3x3 system by Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() <= scale * 1e-13 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / m[row][row];
    }
    Some(x)
}

/// Fits `y = a0*x^2 + a1*x + a2` by least squares through the normal
/// equations of the Vandermonde design matrix.
pub fn fit_parabola(xs: &[f64], ys: &[f64]) -> Result<ParabolaFit> {
    if xs.len() != ys.len() {
        return Err(invalid(format!(
            "fit_parabola: {} x values but {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(invalid("fit_parabola: non-finite input"));
    }
    let distinct = distinct_count(xs);
    if distinct < 3 {
        return Err(Error::SingularFit { distinct });
    }

    // power sums s[j] = sum x^j, t[j] = sum x^j * y
    let mut s = [0.0_f64; 5];
    let mut t = [0.0_f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut p = 1.0;
        for j in 0..5 {
            s[j] += p;
            if j < 3 {
                t[j] += p * y;
            }
            p *= x;
        }
    }
    let normal = [[s[4], s[3], s[2]], [s[3], s[2], s[1]], [s[2], s[1], s[0]]];
    let [a0, a1, a2] =
        solve3(normal, [t[2], t[1], t[0]]).ok_or(Error::SingularFit { distinct })?;
    Ok(ParabolaFit {
        a0,
        a1,
        a2,
        residual: ParabolaFit::residual_of([a0, a1, a2], xs, ys),
    })
}

/// Argmax of the fitted parabola over `[0, 1]`. Candidates are both
/// endpoints and, for a downward parabola, its vertex; ties go to the
/// smaller argument.
pub fn maximize_on_unit_interval(fit: &ParabolaFit) -> f64 {
    let mut candidates = vec![0.0];
    if fit.a0 < 0.0 {
        let vertex = -fit.a1 / (2.0 * fit.a0);
        if vertex > 0.0 && vertex < 1.0 {
            candidates.push(vertex);
        }
    }
    candidates.push(1.0);

    let mut best = candidates[0];
    let mut best_val = fit.eval(best);
    for &x in &candidates[1..] {
        let v = fit.eval(x);
        if v > best_val {
            best = x;
            best_val = v;
        }
    }
    best
}

/// 2-LSE: fixed audacities for the first three queries, then the argmax of
/// the satisfaction-vs-audacity parabola. Falls back to PNF when fewer than
/// three distinct audacities have been tried.
pub fn lse2_alpha(history: &[PastQuery], init: [f64; 3]) -> f64 {
    if history.len() < 3 {
        return init[history.len()];
    }
    let xs: Vec<f64> = history.iter().map(|q| q.alpha).collect();
    let ys: Vec<f64> = history.iter().map(|q| q.sigma).collect();
    match fit_parabola(&xs, &ys) {
        Ok(fit) => maximize_on_unit_interval(&fit),
        Err(_) => pnf_alpha(history, init[0]),
    }
}

/// `max(0, 1 - (k - 1) / 25)`
pub fn gamma_decaying(k: usize) -> f64 {
    let k = k.max(1) as f64;
    (1.0 - (k - 1.0) / 25.0).max(0.0)
}

fn blend(gamma: f64, pnf: f64, lse: f64) -> f64 {
    (gamma * pnf + (1.0 - gamma) * lse).clamp(0.0, 1.0)
}

/// WS: `gamma * pnf + (1 - gamma) * lse2`, each on its own defaults.
pub fn ws_alpha(history: &[PastQuery], strategy: &AudacityStrategy, k: usize) -> f64 {
    let gamma = strategy.gamma.gamma(k);
    blend(
        gamma,
        pnf_alpha(history, strategy.pnf_alpha0),
        lse2_alpha(history, strategy.lse_alphas),
    )
}

/// Audacity for query `k`; a manual override always wins.
pub fn compute_alpha(history: &[PastQuery], strategy: &AudacityStrategy, k: usize) -> f64 {
    if let Some(a) = strategy.manual_override {
        return a;
    }
    match strategy.kind {
        StrategyKind::Pnf => pnf_alpha(history, strategy.pnf_alpha0),
        StrategyKind::Lse2 => lse2_alpha(history, strategy.lse_alphas),
        StrategyKind::Ws => ws_alpha(history, strategy, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(f64, f64)]) -> Vec<PastQuery> {
        pairs
            .iter()
            .map(|&(s, a)| PastQuery::new(s, a).unwrap())
            .collect()
    }

    #[test]
    fn pnf_examples() {
        assert_eq!(pnf_alpha(&[], 0.55), 0.55);
        assert_eq!(pnf_alpha(&hist(&[(0.5, 0.7)]), 0.55), 0.7);
        assert!((pnf_alpha(&hist(&[(0.8, 0.5)]), 0.55) - 0.8).abs() < 1e-12);
        assert_eq!(pnf_alpha(&hist(&[(1.0, 0.9)]), 0.55), 1.0);
        assert_eq!(pnf_alpha(&hist(&[(0.0, 0.2)]), 0.55), 0.0);
        assert!((pnf_alpha(&hist(&[(0.25, 0.6)]), 0.55) - 0.35).abs() < 1e-12);
    }

    #[test]
    fn fit_interpolates_three_points() {
        let fit = fit_parabola(&[0.2, 0.5, 0.8], &[0.64, 0.79, 0.76]).unwrap();
        assert!((fit.a0 + 1.0).abs() < 1e-9);
        assert!((fit.a1 - 1.2).abs() < 1e-9);
        assert!((fit.a2 - 0.44).abs() < 1e-9);
        assert!(fit.residual < 1e-18);
    }

    #[test]
    fn fit_collinear_is_a_line() {
        let fit = fit_parabola(&[0.0, 0.5, 1.0], &[0.1, 0.35, 0.6]).unwrap();
        assert!(fit.a0.abs() < 1e-12);
        assert!((fit.a1 - 0.5).abs() < 1e-12);
        assert!((fit.a2 - 0.1).abs() < 1e-12);
        assert!(fit.residual < 1e-20);
    }

    #[test]
    fn fit_recovers_generator_with_repeated_x() {
        let f = |x: f64| 0.7 * x * x - 0.3 * x + 0.2;
        let xs = [0.1, 0.3, 0.3, 0.6, 0.9];
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let fit = fit_parabola(&xs, &ys).unwrap();
        assert!((fit.a0 - 0.7).abs() < 1e-9);
        assert!((fit.a1 + 0.3).abs() < 1e-9);
        assert!((fit.a2 - 0.2).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_parabola(&[0.5, 0.5, 0.2], &[0.1, 0.2, 0.3]),
            Err(Error::SingularFit { distinct: 2 })
        ));
        assert!(fit_parabola(&[0.1, 0.2], &[0.1, 0.2]).is_err());
        assert!(fit_parabola(&[0.1, 0.2, 0.3], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn maximize_examples() {
        let f = |a0, a1, a2| ParabolaFit { a0, a1, a2, residual: 0.0 };
        assert!((maximize_on_unit_interval(&f(-1.0, 1.2, 0.44)) - 0.6).abs() < 1e-12);
        assert_eq!(maximize_on_unit_interval(&f(2.6, -2.5, 0.8)), 1.0);
        assert_eq!(maximize_on_unit_interval(&f(0.0, 0.0, 0.3)), 0.0);
        // vertex outside the interval: endpoint wins
        assert_eq!(maximize_on_unit_interval(&f(-1.0, 4.0, 0.0)), 1.0);
        assert_eq!(maximize_on_unit_interval(&f(-1.0, -1.0, 0.0)), 0.0);
    }

    #[test]
    fn lse2_examples() {
        let init = [0.5, 0.6, 0.4];
        assert_eq!(lse2_alpha(&[], init), 0.5);
        assert_eq!(lse2_alpha(&hist(&[(0.3, 0.5)]), init), 0.6);
        assert_eq!(lse2_alpha(&hist(&[(0.3, 0.5), (0.4, 0.6)]), init), 0.4);
        let h = hist(&[(0.64, 0.2), (0.79, 0.5), (0.76, 0.8)]);
        assert!((lse2_alpha(&h, init) - 0.6).abs() < 1e-9);
        let flat = hist(&[(0.2, 0.5), (0.9, 0.5), (0.7, 0.5)]);
        assert_eq!(lse2_alpha(&flat, init), pnf_alpha(&flat, 0.5));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_decaying(1), 1.0);
        assert_eq!(gamma_decaying(26), 0.0);
        assert_eq!(gamma_decaying(40), 0.0);
        assert!((gamma_decaying(11) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn ws_endpoints_and_blend() {
        let h = hist(&[(0.64, 0.2), (0.79, 0.5), (0.76, 0.8), (0.7, 0.6)]);
        let mut s = AudacityStrategy::of_kind(StrategyKind::Ws);
        s.gamma = GammaSchedule::Constant(1.0);
        assert_eq!(ws_alpha(&h, &s, 5), pnf_alpha(&h, 0.55));
        s.gamma = GammaSchedule::Constant(0.0);
        assert_eq!(ws_alpha(&h, &s, 5), lse2_alpha(&h, s.lse_alphas));
        assert!((blend(0.5, 0.6, 0.8) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn compute_alpha_dispatch() {
        let h = hist(&[(0.9, 0.1), (0.1, 0.9)]);
        let mut s = AudacityStrategy::of_kind(StrategyKind::Pnf);
        assert_eq!(compute_alpha(&[], &s, 1), 0.55);
        s.manual_override = Some(0.42);
        assert_eq!(compute_alpha(&h, &s, 3), 0.42);
        let ws = AudacityStrategy::default();
        assert_eq!(compute_alpha(&[], &ws, 1), 0.55);
        assert_eq!(
            compute_alpha(&h, &AudacityStrategy::of_kind(StrategyKind::Lse2), 3),
            0.4
        );
    }

    #[test]
    fn config_keys() {
        let mut s = AudacityStrategy::default();
        assert!(s.set_key("strategy.kind", "2-LSE").unwrap());
        assert!(s.set_key("strategy.lse_alphas", "0.1, 0.2,0.3").unwrap());
        assert!(s.set_key("strategy.gamma.constant", "0.25").unwrap());
        assert!(s.set_key("strategy.manual_override", "none").unwrap());
        assert!(!s.set_key("engine.sel_degree", "0.4").unwrap());
        assert_eq!(s.kind, StrategyKind::Lse2);
        assert_eq!(s.lse_alphas, [0.1, 0.2, 0.3]);
        assert_eq!(s.gamma, GammaSchedule::Constant(0.25));
        assert!(s.set_key("strategy.pnf_alpha0", "1.5").is_err());
        assert!(s.set_key("strategy.lse_alphas", "0.1,0.2").is_err());
        s.validate().unwrap();
    }
}
