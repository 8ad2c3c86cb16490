use crate::error::{Error, Result};
use crate::markov::Distribution;

/// Stationary distribution renormalized onto the flagged actions.
pub fn tailed_distribution(pi: &Distribution, flagged: &[usize]) -> Result<Distribution> {
    if flagged.is_empty() {
        return Err(Error::InvalidInput("flag set is empty".into()));
    }
    if let Some(&a) = flagged.iter().find(|&&a| a >= pi.len()) {
        return Err(Error::InvalidInput(format!("flagged action {a} out of range")));
    }
    let eps = pi.mass_of(flagged);
    if !(eps > 0.0) {
        return Err(Error::ZeroFlagMass);
    }
    let mut mass = vec![0.0; pi.len()];
    for &a in flagged {
        mass[a] = pi[a] / eps;
    }
    Distribution::new(mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let pi = Distribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let t = tailed_distribution(&pi, &[2, 3]).unwrap();
        let expected = [0.0, 0.0, 2.0 / 3.0, 1.0 / 3.0];
        for i in 0..4 {
            assert!((t[i] - expected[i]).abs() < 1e-15);
        }
        let all = tailed_distribution(&pi, &[0, 1, 2, 3]).unwrap();
        for i in 0..4 {
            assert!((all[i] - pi[i]).abs() < 1e-15);
        }
        assert_eq!(tailed_distribution(&pi, &[1]).unwrap().as_slice(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_mass_is_an_error() {
        let pi = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(tailed_distribution(&pi, &[1]), Err(Error::ZeroFlagMass)));
    }
}
