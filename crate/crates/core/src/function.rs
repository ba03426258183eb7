//! Dense cost tables.
//!
//! A table of arity `m` over domain `{0..d-1}` has `d^m` rows. Row indices
//! use a mixed-radix encoding with the first scope coordinate most
//! significant, so `(a_0, .., a_{m-1})` lives at `sum a_i * d^(m-1-i)`.
//!
//! Tables are stored dictionary-encoded: the distinct values in order of
//! first appearance, plus one palette index per row. The encoding is
//! canonical, so structural equality and hashing coincide with equality of
//! the underlying functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::cost::Cost;
use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CostFunction {
    arity: usize,
    domain_size: usize,
    palette: Arc<[Cost]>,
    rows: Arc<[u32]>,
}

/// `d^m`, or `None` on overflow.
pub fn table_len(domain_size: usize, arity: usize) -> Option<usize> {
    domain_size.checked_pow(u32::try_from(arity).ok()?)
}

impl CostFunction {
    /// Builds a function from its full table in row order.
    pub fn new(arity: usize, domain_size: usize, table: Vec<Cost>) -> Result<Self, Error> {
        if domain_size == 0 {
            return Err(Error::EmptyDomain);
        }
        let expected = table_len(domain_size, arity).ok_or(Error::TableLength {
            expected: usize::MAX,
            actual: table.len(),
        })?;
        if table.len() != expected {
            return Err(Error::TableLength {
                expected,
                actual: table.len(),
            });
        }
        let mut lookup: HashMap<Cost, u32> = HashMap::new();
        let mut palette = Vec::new();
        let mut rows = Vec::with_capacity(table.len());
        for cost in table {
            let next = palette.len() as u32;
            let idx = *lookup.entry(cost.clone()).or_insert_with(|| {
                palette.push(cost);
                next
            });
            rows.push(idx);
        }
        Ok(CostFunction {
            arity,
            domain_size,
            palette: palette.into(),
            rows: rows.into(),
        })
    }

    pub fn from_fn(
        arity: usize,
        domain_size: usize,
        mut f: impl FnMut(&[usize]) -> Cost,
    ) -> Result<Self, Error> {
        let len = table_len(domain_size, arity).ok_or(Error::TableLength {
            expected: usize::MAX,
            actual: 0,
        })?;
        let mut tuple = vec![0usize; arity];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            table.push(f(&tuple));
            increment(&mut tuple, domain_size);
        }
        Self::new(arity, domain_size, table)
    }

    /// The nullary function with the given value.
    pub fn constant(domain_size: usize, value: Cost) -> Self {
        CostFunction {
            arity: 0,
            domain_size,
            palette: vec![value].into(),
            rows: vec![0].into(),
        }
    }

    /// Crisp function: 0 on tuples accepted by `allowed`, infinite elsewhere.
    pub fn crisp(
        arity: usize,
        domain_size: usize,
        mut allowed: impl FnMut(&[usize]) -> bool,
    ) -> Result<Self, Error> {
        Self::from_fn(arity, domain_size, |t| {
            if allowed(t) {
                Cost::zero()
            } else {
                Cost::Infinite
            }
        })
    }

    /// Crisp function of a relation given as a list of tuples.
    pub fn relation(arity: usize, domain_size: usize, tuples: &[Vec<usize>]) -> Result<Self, Error> {
        for t in tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&v) = t.iter().find(|&&v| v >= domain_size) {
                return Err(Error::ValueOutOfRange {
                    variable: 0,
                    value: v,
                    domain_size,
                });
            }
        }
        Self::crisp(arity, domain_size, |t| tuples.iter().any(|r| r == t))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Number of rows, `d^m`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct values of the table in order of first appearance.
    pub fn distinct_values(&self) -> &[Cost] {
        &self.palette
    }

    pub fn entry(&self, row: usize) -> &Cost {
        &self.palette[self.rows[row] as usize]
    }

    pub fn value(&self, tuple: &[usize]) -> &Cost {
        self.entry(self.row_index(tuple))
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = &Cost> + '_ {
        self.rows.iter().map(move |&i| &self.palette[i as usize])
    }

    pub fn to_table(&self) -> Vec<Cost> {
        self.entries().cloned().collect()
    }

    pub fn row_index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        tuple.iter().fold(0, |acc, &v| acc * self.domain_size + v)
    }

    pub fn tuple_of(&self, mut row: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.arity];
        for slot in tuple.iter_mut().rev() {
            *slot = row % self.domain_size;
            row /= self.domain_size;
        }
        tuple
    }

    /// Every entry is 0 or infinite.
    pub fn is_crisp(&self) -> bool {
        self.palette.iter().all(|c| c.is_zero() || c.is_infinite())
    }

    /// Restricts the function by fixing some argument positions.
    ///
    /// `fixed[i] = Some(v)` pins position `i` to `v`; the remaining positions
    /// keep their relative order in the result.
    pub fn restrict(&self, fixed: &[Option<usize>]) -> Result<Self, Error> {
        if fixed.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: fixed.len(),
            });
        }
        if let Some((pos, v)) = fixed
            .iter()
            .enumerate()
            .find_map(|(p, v)| v.filter(|&v| v >= self.domain_size).map(|v| (p, v)))
        {
            return Err(Error::ValueOutOfRange {
                variable: pos,
                value: v,
                domain_size: self.domain_size,
            });
        }
        Ok(self.restrict_unchecked(fixed))
    }

    pub(crate) fn restrict_unchecked(&self, fixed: &[Option<usize>]) -> Self {
        let d = self.domain_size;
        let mut base = 0usize;
        let mut stride = 1usize;
        // strides of free positions, most significant first
        let mut free_strides = Vec::new();
        for slot in fixed.iter().rev() {
            match slot {
                Some(v) => base += v * stride,
                None => free_strides.push(stride),
            }
            stride *= d;
        }
        if free_strides.len() == self.arity {
            return self.clone();
        }
        free_strides.reverse();
        let new_arity = free_strides.len();
        let new_len = d.pow(new_arity as u32);

        let mut remap = vec![u32::MAX; self.palette.len()];
        let mut palette = Vec::new();
        let mut rows = Vec::with_capacity(new_len);
        let mut counter = vec![0usize; new_arity];
        let mut offset = base;
        for _ in 0..new_len {
            let old = self.rows[offset] as usize;
            if remap[old] == u32::MAX {
                remap[old] = palette.len() as u32;
                palette.push(self.palette[old].clone());
            }
            rows.push(remap[old]);
            // odometer over the free positions, last one fastest
            for pos in (0..new_arity).rev() {
                counter[pos] += 1;
                offset += free_strides[pos];
                if counter[pos] < d {
                    break;
                }
                offset -= d * free_strides[pos];
                counter[pos] = 0;
            }
        }
        CostFunction {
            arity: new_arity,
            domain_size: d,
            palette: palette.into(),
            rows: rows.into(),
        }
    }

    /// All restrictions `(Q, gamma)` in canonical order: `Q` by bitmask
    /// ascending (bit `i` is position `i`), then `gamma` lexicographic over
    /// the positions of `Q` in increasing order.
    pub fn restrictions(&self) -> impl Iterator<Item = (u64, Vec<usize>, CostFunction)> + '_ {
        assert!(self.arity < 64);
        let d = self.domain_size;
        (0..(1u64 << self.arity)).flat_map(move |mask| {
            let positions: Vec<usize> = (0..self.arity).filter(|p| mask >> p & 1 == 1).collect();
            let count = d.pow(positions.len() as u32);
            (0..count).map(move |code| {
                let mut values = vec![0; positions.len()];
                let mut c = code;
                for slot in values.iter_mut().rev() {
                    *slot = c % d;
                    c /= d;
                }
                let mut fixed = vec![None; self.arity];
                for (&p, &v) in positions.iter().zip(&values) {
                    fixed[p] = Some(v);
                }
                (mask, values, self.restrict_unchecked(&fixed))
            })
        })
    }
}

/// Advances `tuple` to the next tuple in row order (last coordinate fastest).
/// Returns false when it wraps around to all zeros.
pub fn increment(tuple: &mut [usize], domain_size: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < domain_size {
            return true;
        }
        *slot = 0;
    }
    false
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CostFunction(m={}, d={}, [", self.arity, self.domain_size)?;
        for (i, c) in self.entries().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("])")
    }
}
