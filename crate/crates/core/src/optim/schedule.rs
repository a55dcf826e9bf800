use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Cosine annealing from `lr0` at step 0 to `lr_min` at `total_steps`.
pub fn cosine_lr(step: usize, total_steps: usize, lr0: f64, lr_min: f64) -> Result<f64> {
    if total_steps == 0 || step > total_steps {
        return Err(Error::Domain(format!(
            "cosine schedule step {step} outside 0..={total_steps}"
        )));
    }
    let progress = step as f64 / total_steps as f64;
    Ok(lr_min + 0.5 * (lr0 - lr_min) * (1.0 + (PI * progress).cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(cosine_lr(0, 10, 1e-3, 1e-5).unwrap(), 1e-3);
        assert!((cosine_lr(10, 10, 1e-3, 1e-5).unwrap() - 1e-5).abs() < 1e-18);
        assert!((cosine_lr(5, 10, 1e-3, 1e-5).unwrap() - (1e-3 + 1e-5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_non_increasing() {
        let lrs: Vec<f64> = (0..=300).map(|s| cosine_lr(s, 300, 0.1, 0.0).unwrap()).collect();
        assert!(lrs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn out_of_range() {
        assert!(cosine_lr(11, 10, 1.0, 0.0).is_err());
        assert!(cosine_lr(0, 0, 1.0, 0.0).is_err());
    }
}
