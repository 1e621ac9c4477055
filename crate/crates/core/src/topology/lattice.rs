//! Integer lattices of homotopy classes and their Hermite normal form.

use num_integer::Integer;

/// Row-style Hermite normal form of the integer span of `rows`.
///
/// The result is in echelon form: each row's leading entry is positive, lies
/// strictly to the right of the previous row's, and every entry above a pivot
/// is reduced into `[0, pivot)`. Zero rows are dropped, so the row count is
/// the rank.
pub fn hermite_normal_form(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .filter(|r: &Vec<i128>| r.iter().any(|&x| x != 0))
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        if pivot_row >= m.len() {
            break;
        }
        loop {
            // Row with the smallest nonzero magnitude in this column.
            let best = (pivot_row..m.len())
                .filter(|&r| m[r][col] != 0)
                .min_by_key(|&r| (m[r][col].abs(), r));
            let Some(best) = best else { break };
            m.swap(pivot_row, best);
            let p = m[pivot_row][col];
            let mut done = true;
            for r in (pivot_row + 1)..m.len() {
                let q = Integer::div_floor(&m[r][col], &p);
                if q != 0 {
                    for c in col..n {
                        m[r][c] -= q * m[pivot_row][c];
                    }
                }
                if m[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && m[pivot_row][col] != 0 {
            if m[pivot_row][col] < 0 {
                m[pivot_row].iter_mut().for_each(|x| *x = -*x);
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    for &(r, c) in &pivots {
        let p = m[r][c];
        for above in 0..r {
            let q = Integer::div_floor(&m[above][c], &p);
            if q != 0 {
                for k in c..n {
                    m[above][k] -= q * m[r][k];
                }
            }
        }
    }
    m.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).expect("lattice entry overflows i64"))
                .collect()
        })
        .collect()
}

/// Divides out the gcd of the entries and makes the first nonzero entry positive.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return v.to_vec();
    }
    let sign = v.iter().find(|&&x| x != 0).map_or(1, |x| x.signum());
    v.iter().map(|&x| sign * x / g).collect()
}

/// Whether `v` lies in the integer span of an HNF basis.
pub fn in_lattice(basis: &[Vec<i64>], v: &[i64]) -> bool {
    let mut r: Vec<i128> = v.iter().map(|&x| i128::from(x)).collect();
    for row in basis {
        let Some(c) = row.iter().position(|&x| x != 0) else { continue };
        let p = i128::from(row[c]);
        if r[c] % p != 0 {
            return false;
        }
        let q = r[c] / p;
        for (k, x) in r.iter_mut().enumerate() {
            *x -= q * i128::from(row[k]);
        }
    }
    r.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hnf_small_cases() {
        assert_eq!(hermite_normal_form(&[vec![1, 1]], 2), vec![vec![1, 1]]);
        assert_eq!(hermite_normal_form(&[vec![-2, -2]], 2), vec![vec![2, 2]]);
        assert_eq!(
            hermite_normal_form(&[vec![0, 1], vec![1, 0]], 2),
            vec![vec![1, 0], vec![0, 1]]
        );
        assert_eq!(
            hermite_normal_form(&[vec![2, 0], vec![3, 1], vec![0, 0]], 2),
            vec![vec![1, 1], vec![0, 2]]
        );
        assert!(hermite_normal_form(&[vec![0, 0]], 2).is_empty());
        assert!(hermite_normal_form(&[], 2).is_empty());
    }

    #[test]
    fn primitive_direction() {
        assert_eq!(primitive(&[-2, -4]), vec![1, 2]);
        assert_eq!(primitive(&[0, 3]), vec![0, 1]);
        assert_eq!(primitive(&[0, 0]), vec![0, 0]);
    }

    fn det2(a: &[i64], b: &[i64]) -> i64 {
        a[0] * b[1] - a[1] * b[0]
    }

    proptest! {
        #[test]
        fn hnf_spans_generators(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 0..6)) {
            let basis = hermite_normal_form(&rows, 3);
            for r in &rows {
                prop_assert!(in_lattice(&basis, r));
            }
            // Basis rows are themselves integer combinations of the input rows,
            // so re-reducing the union changes nothing.
            let mut both = rows.clone();
            both.extend(basis.iter().cloned());
            prop_assert_eq!(hermite_normal_form(&both, 3), basis.clone());
            // Independent of row order.
            let mut rev = rows.clone();
            rev.reverse();
            prop_assert_eq!(hermite_normal_form(&rev, 3), basis);
        }

        #[test]
        fn hnf_rank_two_index(a in prop::collection::vec(-5i64..=5, 2), b in prop::collection::vec(-5i64..=5, 2)) {
            let basis = hermite_normal_form(&[a.clone(), b.clone()], 2);
            let d = det2(&a, &b).abs();
            if d != 0 {
                prop_assert_eq!(basis.len(), 2);
                prop_assert_eq!(basis[0][0] * basis[1][1], d);
            } else {
                prop_assert!(basis.len() <= 1);
            }
        }
    }
}
