use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::matrix::{Distribution, StochasticMatrix};
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::tolerance::{ceil_tol, Tolerances};

/// Spectrum of a chain with its spectral gap `1 - |lambda_2|`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralInfo {
    /// Sorted by descending modulus.
    pub eigenvalues: Vec<Complex64>,
    pub gap: f64,
    pub stationary: Distribution,
}

impl SpectralInfo {
    /// `|lambda_2|`, zero for a single-state chain.
    pub fn second_modulus(&self) -> f64 {
        self.eigenvalues.get(1).map_or(0.0, |z| z.norm())
    }
}

pub fn stationary_distribution(p: &StochasticMatrix) -> Result<Distribution> {
    stationary_distribution_with(p, &Tolerances::default())
}

pub fn stationary_distribution_with(p: &StochasticMatrix, tol: &Tolerances) -> Result<Distribution> {
    p.check_ergodic()?;
    let n = p.n();
    let mass = if n <= tol.dense_limit { dense_stationary(p)? } else { power_stationary(p, tol)? };
    let residual = variational_l1(&p.apply(&mass), &mass);
    if residual > tol.stationary {
        return Err(Error::NumericalFailure(format!("stationary residual {residual:e}")));
    }
    Distribution::new(mass)
}

/// Solves `(P - I) pi = 0` with the last balance equation replaced by
/// normalization.
fn dense_stationary(p: &StochasticMatrix) -> Result<Vec<f64>> {
    let n = p.n();
    let mut a = p.matrix() - DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        a[(n - 1, i)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NumericalFailure("singular stationary system".into()))?;
    Ok(clean_mass(x.iter().copied()))
}

fn power_stationary(p: &StochasticMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let n = p.n();
    let mut mass = vec![1.0 / n as f64; n];
    for _ in 0..tol.power_iteration_cap {
        let next = clean_mass(p.apply(&mass).into_iter());
        let change = variational_l1(&next, &mass);
        mass = next;
        if change <= tol.stationary * 1e-2 {
            return Ok(mass);
        }
    }
    Err(Error::NoConvergence(tol.power_iteration_cap))
}

/// Clears roundoff negatives and renormalizes.
fn clean_mass(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let v: Vec<f64> = values.map(|x| x.max(0.0)).collect();
    let total: f64 = v.iter().sum();
    v.into_iter().map(|x| x / total).collect()
}

fn variational_l1(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

pub fn variational_distance(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(variational_l1(a.as_slice(), b.as_slice()))
}

pub fn spectral_info(p: &StochasticMatrix) -> Result<SpectralInfo> {
    let stationary = stationary_distribution(p)?;
    let tol = Tolerances::default();
    let mut eigenvalues = if is_reversible(p, &stationary) {
        symmetric_spectrum(p, &stationary)?
    } else {
        general_spectrum(p)?
    };
    eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    if (eigenvalues[0] - Complex64::new(1.0, 0.0)).norm() > tol.leading_eigenvalue {
        return Err(Error::NumericalFailure(format!("leading eigenvalue {}", eigenvalues[0])));
    }
    let gap = 1.0 - eigenvalues.get(1).map_or(0.0, |z| z.norm());
    if gap <= tol.leading_eigenvalue {
        return Err(Error::NonErgodic("second eigenvalue has unit modulus".into()));
    }
    Ok(SpectralInfo { eigenvalues, gap: gap.min(1.0), stationary })
}

/// Eigenvalues of a reversible chain via `D^{-1/2} P D^{1/2}`, which is
/// symmetric when detailed balance holds.
fn symmetric_spectrum(p: &StochasticMatrix, pi: &Distribution) -> Result<Vec<Complex64>> {
    let n = p.n();
    let sqrt: Vec<f64> = pi.iter().map(|x| x.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |j, i| p.prob(j, i) * sqrt[i] / sqrt[j]);
    let sym = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-15, 100_000)
        .ok_or_else(|| Error::NumericalFailure("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect())
}

fn general_spectrum(p: &StochasticMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::Schur::try_new(p.matrix().clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn is_reversible(p: &StochasticMatrix, pi: &Distribution) -> bool {
    is_reversible_with(p, pi, &Tolerances::default())
}

pub fn is_reversible_with(p: &StochasticMatrix, pi: &Distribution, tol: &Tolerances) -> bool {
    let n = p.n();
    pi.len() == n
        && (0..n).all(|i| (0..n).all(|j| (pi[i] * p.prob(j, i) - pi[j] * p.prob(i, j)).abs() <= tol.reversibility))
}

/// Time-reversed chain `P*[i][j] = pi_i P[j][i] / pi_j`.
pub fn time_reversal(p: &StochasticMatrix, pi: &Distribution) -> Result<StochasticMatrix> {
    let n = p.n();
    if pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: pi.len() });
    }
    if let Some(j) = (0..n).find(|&j| pi[j] <= 0.0) {
        return Err(Error::ZeroStationaryMass(j));
    }
    let entries = DMatrix::from_fn(n, n, |i, j| pi[i] * p.prob(j, i) / pi[j]);
    // column sums equal (P pi)_j / pi_j, which is one only up to the
    // stationary residual; renormalize so the result validates at 1e-12
    let mut entries = entries;
    for mut col in entries.column_iter_mut() {
        let s: f64 = col.iter().sum();
        col /= s;
    }
    StochasticMatrix::new(entries)
}

/// `P^t pi0`, charging `t` classical diffusions.
pub fn mix(p: &StochasticMatrix, start: &Distribution, t: u64, ledger: &mut CostLedger) -> Result<Distribution> {
    if start.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: start.len() });
    }
    let mut mass = start.as_slice().to_vec();
    for _ in 0..t {
        mass = p.apply(&mass);
    }
    ledger.classical_diffusions += t;
    Distribution::new(clean_mass(mass.into_iter()))
}

/// Upper mixing-time bound `ceil((max_i ln(1/pi_i) + ln(1/eps)) / delta)`
/// for a reversible chain.
pub fn mixing_time_upper_bound(p: &StochasticMatrix, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidInput(format!("precision {eps} must lie in (0, 1]")));
    }
    if p.n() == 1 {
        return Ok(ceil_tol((1.0 / eps).ln()).max(0.0) as u64);
    }
    let info = spectral_info(p)?;
    mixing_time_from(&info.stationary, info.gap, eps)
}

pub(crate) fn mixing_time_from(pi: &Distribution, gap: f64, eps: f64) -> Result<u64> {
    if let Some(i) = (0..pi.len()).find(|&i| pi[i] <= 0.0) {
        return Err(Error::ZeroStationaryMass(i));
    }
    let k0 = pi.iter().map(|x| (1.0 / x).ln()).fold(f64::NEG_INFINITY, f64::max);
    Ok(ceil_tol((k0 + (1.0 / eps).ln()) / gap).max(0.0) as u64)
}
