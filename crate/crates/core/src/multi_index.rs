//! Multi-indices `alpha` in `N^d`, enumerated by total degree and then lexicographically
//! descending (graded lex): for `d = 2` and degree 2, `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)`.

pub type MultiIndex = Vec<usize>;

/// All `alpha` with `|alpha| <= max_degree`.
pub fn up_to_degree(d: usize, max_degree: usize) -> Vec<MultiIndex> {
    (0..=max_degree).flat_map(|k| of_degree(d, k)).collect()
}

/// All `alpha` with `|alpha| = degree`.
pub fn of_degree(d: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0; d];
    fill(&mut cur, 0, degree, &mut out);
    out
}

fn fill(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<MultiIndex>) {
    let d = cur.len();
    if d == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == d - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        fill(cur, pos + 1, left - a, out);
    }
}

pub fn degree(alpha: &[usize]) -> usize {
    alpha.iter().sum()
}

/// `alpha!`
pub fn factorial(alpha: &[usize]) -> f64 {
    alpha
        .iter()
        .map(|&a| (1..=a).map(|i| i as f64).product::<f64>())
        .product()
}

/// `x^alpha`
pub fn power(x: &[f64], alpha: &[usize]) -> f64 {
    x.iter()
        .zip(alpha)
        .map(|(xi, &a)| xi.powi(a as i32))
        .product()
}

/// Number of `alpha` in `d` variables with `|alpha| <= k`: `C(k + d, d)`.
pub fn count_up_to(d: usize, k: usize) -> usize {
    let mut c: u128 = 1;
    for i in 0..d as u128 {
        c = c * (k as u128 + i + 1) / (i + 1);
    }
    c as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        assert_eq!(
            up_to_degree(2, 2),
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert_eq!(up_to_degree(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn counts_match_binomial() {
        for d in 1..5 {
            for k in 0..6 {
                assert_eq!(up_to_degree(d, k).len(), count_up_to(d, k));
            }
        }
        assert_eq!(count_up_to(2, 3), 10);
    }

    #[test]
    fn factorial_and_power() {
        assert_eq!(factorial(&[3, 2]), 12.0);
        assert_eq!(power(&[2.0, 3.0], &[2, 1]), 12.0);
        assert_eq!(power(&[5.0], &[0]), 1.0);
    }
}
