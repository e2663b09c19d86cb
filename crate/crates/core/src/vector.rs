use crate::error::{Error, Result};

/// Dense iterate `w` in `R^d`. The optimization variable of every solver.
///
/// Entries are finite at API boundaries; construction through
/// [`WeightVector::new_checked`] enforces this.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn zeros(d: usize) -> Self {
        Self { values: vec![0.0; d] }
    }

    /// Wraps raw values without the finiteness check. Internal hot paths only.
    pub fn from_vec(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn new_checked(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("weight vector contains NaN/Inf"));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &WeightVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &WeightVector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    pub fn sub(&self, other: &WeightVector) -> WeightVector {
        debug_assert_eq!(self.len(), other.len());
        WeightVector::from_vec(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn dist_sq(&self, other: &WeightVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Convex combination `(1 - gamma) * self + gamma * other`, in place.
    pub fn mix(&mut self, gamma: f64, other: &WeightVector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a = (1.0 - gamma) * *a + gamma * b;
        }
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(WeightVector::new_checked(vec![1.0, f64::NAN]).is_err());
        assert!(WeightVector::new_checked(vec![1.0, f64::INFINITY]).is_err());
        assert!(WeightVector::new_checked(vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn basic_algebra() {
        let mut a = WeightVector::from_vec(vec![1.0, 2.0]);
        let b = WeightVector::from_vec(vec![3.0, -1.0]);
        assert_eq!(a.dot(&b), 1.0);
        a.axpy(2.0, &b);
        assert_eq!(a.values(), &[7.0, 0.0]);
        a.mix(0.5, &b);
        assert_eq!(a.values(), &[5.0, -0.5]);
    }
}
