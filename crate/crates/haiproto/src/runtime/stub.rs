//! Nearest-centroid classifier standing in for the learned model.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("no training examples")]
    Untrained,
    #[error("expected {expected} features, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NearestCentroid {
    examples: Vec<(Vec<f64>, String)>,
}

impl NearestCentroid {
    pub fn new(examples: Vec<(Vec<f64>, String)>) -> Self {
        NearestCentroid { examples }
    }

    pub fn examples(&self) -> &[(Vec<f64>, String)] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn learn(&mut self, x: Vec<f64>, label: &str) {
        self.examples.push((x, label.to_string()));
    }

    /// Known labels, sorted.
    pub fn labels(&self) -> Vec<&str> {
        let mut l: Vec<&str> = self.examples.iter().map(|(_, y)| y.as_str()).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Mean vector per label, keyed in label order.
    pub fn centroids(&self) -> BTreeMap<&str, Vec<f64>> {
        let mut acc: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
        for (x, y) in &self.examples {
            let (sum, n) = acc.entry(y).or_insert_with(|| (vec![0.0; x.len()], 0));
            for (s, v) in sum.iter_mut().zip(x) {
                *s += v;
            }
            *n += 1;
        }
        acc.into_iter()
            .map(|(y, (sum, n))| (y, sum.into_iter().map(|s| s / n as f64).collect()))
            .collect()
    }

    /// Label of the closest centroid; on equal distance the
    /// lexicographically smallest label wins.
    pub fn classify(&self, x: &[f64]) -> Result<String, ClassifyError> {
        let dim = self.examples.first().ok_or(ClassifyError::Untrained)?.0.len();
        if let Some((bad, _)) = self.examples.iter().find(|(v, _)| v.len() != dim) {
            return Err(ClassifyError::Dimension { expected: dim, got: bad.len() });
        }
        if x.len() != dim {
            return Err(ClassifyError::Dimension { expected: dim, got: x.len() });
        }
        let mut best: Option<(&str, f64)> = None;
        for (label, c) in self.centroids() {
            let d: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((label, d));
            }
        }
        Ok(best.expect("non-empty").0.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(points: &[(&[f64], &str)]) -> NearestCentroid {
        NearestCentroid::new(points.iter().map(|(x, y)| (x.to_vec(), y.to_string())).collect())
    }

    #[test]
    fn nearest_wins() {
        let m = nc(&[(&[0.0, 0.0], "a"), (&[10.0, 10.0], "b")]);
        assert_eq!(m.classify(&[1.0, 1.0]).unwrap(), "a");
        assert_eq!(m.classify(&[9.0, 9.0]).unwrap(), "b");
    }

    #[test]
    fn ties_go_to_the_smaller_label() {
        let m = nc(&[(&[2.0, 0.0], "b"), (&[0.0, 0.0], "a")]);
        assert_eq!(m.classify(&[1.0, 0.0]).unwrap(), "a");
    }

    #[test]
    fn errors() {
        assert_eq!(NearestCentroid::default().classify(&[1.0]), Err(ClassifyError::Untrained));
        let m = nc(&[(&[0.0, 0.0], "a")]);
        assert_eq!(m.classify(&[1.0]), Err(ClassifyError::Dimension { expected: 2, got: 1 }));
    }
}
