//! Exact sparse linear algebra over ℚ(i): incremental echelon forms,
//! canonical reduced bases, nullspaces and affine solves.
//!
//! Pivot rows are scaled to a leading `1`. Pivot selection is "first
//! nonzero in column order", so every reduced basis produced here is the
//! unique RREF of its row space and can be compared byte-for-byte.

use super::gaussian::Gq;

/// Sorted `(index, value)` pairs with no zero values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVec(pub Vec<(usize, Gq)>);

impl SparseVec {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_dense(v: &[Gq]) -> Self {
        Self(v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect())
    }

    /// Builds from unsorted pairs, summing duplicates.
    pub fn from_pairs(mut pairs: Vec<(usize, Gq)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Gq)> = Vec::with_capacity(pairs.len());
        for (i, c) in pairs {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += &c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self(out)
    }

    pub fn to_dense(&self, n: usize) -> Vec<Gq> {
        let mut v = vec![Gq::zero(); n];
        for (i, c) in &self.0 {
            v[*i] = c.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<usize> {
        self.0.first().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Gq {
        match self.0.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.0[k].1.clone(),
            Err(_) => Gq::zero(),
        }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self(self.0.iter().map(|(i, a)| (*i, a * c)).collect())
    }

    /// `self - c·other`.
    pub fn sub_scaled(&self, c: &Gq, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut p, mut q) = (0, 0);
        while p < a.len() || q < b.len() {
            let ia = a.get(p).map(|e| e.0).unwrap_or(usize::MAX);
            let ib = b.get(q).map(|e| e.0).unwrap_or(usize::MAX);
            if ia < ib {
                out.push(a[p].clone());
                p += 1;
            } else if ib < ia {
                out.push((ib, -(c * &b[q].1)));
                q += 1;
            } else {
                let v = &a[p].1 - &(c * &b[q].1);
                if !v.is_zero() {
                    out.push((ia, v));
                }
                p += 1;
                q += 1;
            }
        }
        Self(out)
    }

    /// Restrict to indices in `[lo, hi)` and shift them down by `lo`.
    pub fn window(&self, lo: usize, hi: usize) -> Self {
        Self(self.0.iter().filter(|(i, _)| *i >= lo && *i < hi).map(|(i, c)| (i - lo, c.clone())).collect())
    }
}

/// Row-echelon form built one row at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    pivots: Vec<Option<SparseVec>>,
    rank: usize,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, pivots: vec![None; ncols], rank: 0 }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pivot_cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.iter().enumerate().filter(|(_, p)| p.is_some()).map(|(c, _)| c)
    }

    pub fn pivot_row(&self, col: usize) -> Option<&SparseVec> {
        self.pivots[col].as_ref()
    }

    /// Eliminates leading entries until the lead column is pivot-free.
    fn reduce_lead(&self, mut row: SparseVec) -> SparseVec {
        while let Some(col) = row.lead() {
            match &self.pivots[col] {
                Some(p) => {
                    let c = row.0[0].1.clone();
                    row = row.sub_scaled(&c, p);
                }
                None => break,
            }
        }
        row
    }

    /// Fully reduces `row` against every pivot.
    pub fn reduce(&self, mut row: SparseVec) -> SparseVec {
        let mut pos = 0;
        while pos < row.0.len() {
            let col = row.0[pos].0;
            match &self.pivots[col] {
                Some(p) => {
                    let c = row.0[pos].1.clone();
                    row = row.sub_scaled(&c, p);
                }
                None => pos += 1,
            }
        }
        row
    }

    /// Adds a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, row: SparseVec) -> bool {
        let row = self.reduce_lead(row);
        match row.lead() {
            None => false,
            Some(col) => {
                let inv = row.0[0].1.inv().expect("lead is nonzero");
                self.pivots[col] = Some(row.scale(&inv));
                self.rank += 1;
                true
            }
        }
    }

    /// Membership of `row` in the row space.
    pub fn contains(&self, row: &SparseVec) -> bool {
        self.reduce(row.clone()).is_zero()
    }

    /// The reduced row echelon basis, ordered by pivot column.
    pub fn rref(&self) -> Vec<SparseVec> {
        let cols: Vec<usize> = self.pivot_cols().collect();
        let mut done: Vec<Option<SparseVec>> = vec![None; self.ncols];
        for &c in cols.iter().rev() {
            let mut row = self.pivots[c].clone().unwrap();
            // clear entries at later pivot columns, already reduced
            let mut pos = 1;
            while pos < row.0.len() {
                let col = row.0[pos].0;
                match &done[col] {
                    Some(p) => {
                        let k = row.0[pos].1.clone();
                        row = row.sub_scaled(&k, p);
                    }
                    None => pos += 1,
                }
            }
            done[c] = Some(row);
        }
        cols.into_iter().map(|c| done[c].take().unwrap()).collect()
    }
}

/// Canonical RREF basis of the span of `vectors`.
pub fn span_rref(vectors: impl IntoIterator<Item = SparseVec>, ncols: usize) -> Vec<SparseVec> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.insert(v);
    }
    e.rref()
}

/// Rank of a dense matrix.
pub fn rank(rows: &[Vec<Gq>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(SparseVec::from_dense(r));
    }
    e.rank()
}

/// Nullspace `{v : A v = 0}` of a matrix given by sparse rows, as a canonical
/// RREF basis (lexicographic by unknown index).
pub fn nullspace_sparse(rows: impl IntoIterator<Item = SparseVec>, ncols: usize) -> Vec<SparseVec> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    nullspace_of(&e)
}

/// Nullspace of the row space held by an echelon form.
pub fn nullspace_of(e: &Echelon) -> Vec<SparseVec> {
    let ncols = e.ncols();
    let rref = e.rref();
    let mut is_pivot = vec![false; ncols];
    for r in &rref {
        is_pivot[r.lead().unwrap()] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut pairs = vec![(free, Gq::one())];
        for r in &rref {
            let v = r.get(free);
            if !v.is_zero() {
                pairs.push((r.lead().unwrap(), -v));
            }
        }
        basis.push(SparseVec::from_pairs(pairs));
    }
    span_rref(basis, ncols)
}

/// Dense convenience wrapper over [`nullspace_sparse`].
pub fn exact_nullspace(a: &[Vec<Gq>], ncols: usize) -> Vec<Vec<Gq>> {
    nullspace_sparse(a.iter().map(|r| SparseVec::from_dense(r)), ncols)
        .into_iter()
        .map(|v| v.to_dense(ncols))
        .collect()
}

/// Solves `A·u = b` exactly, with free unknowns set to zero.
/// `None` if the system is inconsistent.
pub fn solve_affine(rows: &[SparseVec], rhs: &[Gq], ncols: usize) -> Option<Vec<Gq>> {
    // augmented column at index ncols
    let mut e = Echelon::new(ncols + 1);
    for (r, b) in rows.iter().zip(rhs) {
        let mut aug = r.clone();
        if !b.is_zero() {
            aug.0.push((ncols, b.clone()));
        }
        e.insert(aug);
    }
    if e.pivot_row(ncols).is_some() {
        return None;
    }
    let mut sol = vec![Gq::zero(); ncols];
    for r in e.rref() {
        let lead = r.lead().unwrap();
        sol[lead] = r.get(ncols);
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Gq {
        Gq::from_int(n)
    }

    #[test]
    fn zero_matrix_nullspace_is_identity() {
        let ns = exact_nullspace(&[vec![q(0), q(0)], vec![q(0), q(0)]], 2);
        assert_eq!(ns, vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
    }

    #[test]
    fn single_row_nullspace() {
        let ns = exact_nullspace(&[vec![q(1), q(1)]], 2);
        assert_eq!(ns, vec![vec![q(1), q(-1)]]);
    }

    #[test]
    fn affine_solve_sets_free_to_zero() {
        // u0 + u1 = 3, u2 free
        let rows = vec![SparseVec::from_dense(&[q(1), q(1), q(0)])];
        let sol = solve_affine(&rows, &[q(3)], 3).unwrap();
        assert_eq!(sol, vec![q(3), q(0), q(0)]);
        let bad = vec![SparseVec::from_dense(&[q(1), q(0)]), SparseVec::from_dense(&[q(2), q(0)])];
        assert!(solve_affine(&bad, &[q(1), q(1)], 2).is_none());
    }

    #[test]
    fn rref_is_canonical() {
        let a = vec![
            SparseVec::from_dense(&[q(2), q(4), q(6)]),
            SparseVec::from_dense(&[q(1), q(3), q(5)]),
        ];
        let b = vec![
            SparseVec::from_dense(&[q(3), q(7), q(11)]),
            SparseVec::from_dense(&[q(0), q(1), q(2)]),
        ];
        assert_eq!(span_rref(a, 3), span_rref(b, 3));
    }
}
