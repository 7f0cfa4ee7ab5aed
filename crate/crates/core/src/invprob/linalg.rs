use crate::number::Rational;

/// Solves `G X = B` column by column with exact Gaussian elimination.
/// Returns `None` when `G` is singular.
pub fn solve_many(mut g: Vec<Vec<Rational>>, rhs: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = g.len();
    let mut b: Vec<Vec<Rational>> = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !g[r][col].is_zero())?;
        g.swap(col, pivot);
        for v in &mut b {
            v.swap(col, pivot);
        }
        let inv = g[col][col].recip().expect("nonzero pivot");
        for row in 0..n {
            if row == col || g[row][col].is_zero() {
                continue;
            }
            let f = &g[row][col] * &inv;
            let (pivot_row, target) = if row < col {
                let (head, tail) = g.split_at_mut(col);
                (&tail[0], &mut head[row])
            } else {
                let (head, tail) = g.split_at_mut(row);
                (&head[col], &mut tail[0])
            };
            for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= &(&f * p);
            }
            for v in &mut b {
                let t = &f * &v[col];
                v[row] -= &t;
            }
        }
    }
    for v in &mut b {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = &*vi / &g[i][i];
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let g = vec![vec![Rational::from_int(2), Rational::from_int(1)], vec![Rational::from_int(1), Rational::from_int(3)]];
        let b = vec![vec![Rational::from_int(3), Rational::from_int(5)]];
        let x = solve_many(g, &b).unwrap();
        assert_eq!(x[0], vec![Rational::frac(4, 5), Rational::frac(7, 5)]);
    }

    #[test]
    fn singular_is_none() {
        let g = vec![vec![Rational::one(), Rational::one()], vec![Rational::one(), Rational::one()]];
        assert!(solve_many(g, &[vec![Rational::one(), Rational::zero()]]).is_none());
    }

    #[test]
    fn empty_system() {
        assert_eq!(solve_many(vec![], &[vec![]]), Some(vec![vec![]]));
    }
}
