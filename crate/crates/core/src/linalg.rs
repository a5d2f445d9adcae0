//! Dense linear algebra over `F_p` for linear searches.

use crate::ring::{mod_inverse, Poly, RingElem};

/// A basis of the nullspace of the matrix with the given rows over `F_p`.
pub fn nullspace_mod_p(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(piv) = (row..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(row, piv);
        let inv = mod_inverse(a[row][col], p).expect("nonzero in a field");
        for x in a[row].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i == row || r[col] == 0 {
                continue;
            }
            let f = r[col];
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x = (*x + p * p - f * y % p) % p;
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[r][fc] % p) % p;
            }
            v
        })
        .collect()
}

/// Linear equations over `F_p` expressing `sum_k u_k e_k = 0` for ring
/// elements `e_k`, one equation per monomial of the common numerator.
pub fn coefficient_equations(elems: &[(usize, RingElem)], p: u64) -> Vec<Vec<(usize, u64)>> {
    let Some((_, first)) = elems.first() else {
        return Vec::new();
    };
    let ndens = first.den().len();
    let mut den = vec![0u32; ndens];
    for (_, e) in elems {
        for (d, &x) in den.iter_mut().zip(e.den()) {
            *d = (*d).max(x);
        }
    }
    let mut eqs: std::collections::BTreeMap<Vec<u32>, Vec<(usize, u64)>> = Default::default();
    for (k, e) in elems {
        let num: Poly = e.numerator_over(&den).expect("denominator dominates");
        for (mono, c) in num.terms() {
            let c = c % p;
            if c != 0 {
                eqs.entry(mono.clone()).or_default().push((*k, c));
            }
        }
    }
    eqs.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_small() {
        // x + y + z = 0, y - z = 0 over F_5.
        let rows = vec![vec![1, 1, 1], vec![0, 1, 4]];
        let ns = nullspace_mod_p(&rows, 3, 5);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        for r in &rows {
            assert_eq!(r.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % 5, 0);
        }
    }
}
