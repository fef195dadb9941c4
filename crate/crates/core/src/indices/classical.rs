use crate::channel::StochasticMatrix;
use crate::error::{invalid, Result};

/// Wielandt's cap `D² − 2D + 2` on the exponent of a primitive matrix.
pub fn wielandt_cap(dim: usize) -> usize {
    dim * dim + 2 - 2 * dim
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
}

/// Least `n` such that every entry of the boolean `n`-th power of the pattern
/// is set, or `None` when the cap `D² − 2D + 2` passes without that happening
/// (no larger power can then be positive).
pub fn classical_exponent_pattern(pattern: &[Vec<bool>]) -> Result<Option<usize>> {
    let dim = pattern.len();
    if dim == 0 || pattern.iter().any(|r| r.len() != dim) {
        return Err(invalid("adjacency pattern must be square and nonempty"));
    }
    let mut power = pattern.to_vec();
    for n in 1..=wielandt_cap(dim) {
        if n > 1 {
            power = bool_mul(&power, pattern);
        }
        if power.iter().flatten().all(|&b| b) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Exponent `p(A)` of a stochastic matrix.
pub fn classical_exponent(s: &StochasticMatrix) -> Result<Option<usize>> {
    classical_exponent_pattern(&s.pattern())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_matrix_has_exponent_one() {
        assert_eq!(classical_exponent_pattern(&[vec![true; 3], vec![true; 3], vec![true; 3]]).unwrap(), Some(1));
    }

    #[test]
    fn cyclic_permutation_is_not_primitive() {
        let p = vec![vec![false, false, true], vec![true, false, false], vec![false, true, false]];
        assert_eq!(classical_exponent_pattern(&p).unwrap(), None);
    }

    #[test]
    fn caps() {
        assert_eq!(wielandt_cap(1), 1);
        assert_eq!(wielandt_cap(3), 5);
        assert_eq!(wielandt_cap(8), 50);
        assert!(classical_exponent_pattern(&[vec![true, false]]).is_err());
    }
}
