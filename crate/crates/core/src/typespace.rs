//! Enumeration of type classes (frequency-count vectors of empirical
//! sequences) via a prefix tree, with exact multinomial emission
//! probabilities.
//!
//! A type class of size N over an alphabet of n symbols is a vector of n
//! nonnegative counts summing to N. The prefix tree has one node per count
//! vector of length at most n with partial sum at most N; its leaves are
//! exactly the type classes, visited in lexicographic order by depth-first
//! traversal. Disjoint branches can be processed independently and merged,
//! which is how the parallel drivers partition work.

use statrs::function::gamma::ln_gamma;

use crate::simplex::{entropy_unchecked, kl_unchecked, ZERO_CELL};
use crate::{Error, Result};

/// A complete frequency-count vector: n nonnegative counts summing to N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeClass {
    size: u64,
    counts: Vec<u64>,
}

impl TypeClass {
    /// Builds a type class, checking that the counts sum to `size`.
    pub fn new(size: u64, counts: Vec<u64>) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total != size {
            return Err(Error::domain(format!(
                "counts sum to {total}, expected {size}"
            )));
        }
        if counts.is_empty() {
            return Err(Error::domain("a type class needs at least one symbol"));
        }
        Ok(TypeClass { size, counts })
    }

    /// The sequence length N.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// The per-symbol counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The empirical distribution counts / N.
    pub fn empirical(&self) -> Vec<f64> {
        let n = self.size as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// A prefix of a type class: up to n leading counts with partial sum at
/// most N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypePrefix {
    size: u64,
    length: usize,
    data: Vec<u64>,
}

impl TypePrefix {
    /// Builds a prefix for type classes of `size` over `length` symbols.
    pub fn new(size: u64, length: usize, data: Vec<u64>) -> Result<Self> {
        if length == 0 {
            return Err(Error::domain("alphabet must have at least one symbol"));
        }
        if data.len() > length {
            return Err(Error::domain(format!(
                "prefix of {} entries exceeds alphabet size {length}",
                data.len()
            )));
        }
        let total: u64 = data.iter().sum();
        if total > size {
            return Err(Error::domain(format!(
                "prefix sum {total} exceeds type size {size}"
            )));
        }
        Ok(TypePrefix { size, length, data })
    }

    /// The empty prefix, root of the whole tree.
    pub fn root(size: u64, length: usize) -> Result<Self> {
        TypePrefix::new(size, length, Vec::new())
    }

    /// The sequence length N.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// The alphabet size n.
    pub fn length(&self) -> usize {
        self.length
    }

    /// The leading counts fixed so far.
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    /// Whether the prefix is a complete type class.
    pub fn is_leaf(&self) -> bool {
        self.data.len() == self.length
    }

    fn remaining(&self) -> u64 {
        self.size - self.data.iter().sum::<u64>()
    }
}

/// The children of a prefix in the tree, in increasing order of the new
/// entry.
///
/// A prefix one short of complete has a single child with the last slot
/// forced to the residual count; otherwise there is one child per value
/// from 0 to the residual. Leaves have no children.
pub fn children(prefix: &TypePrefix) -> Result<Vec<TypePrefix>> {
    if prefix.is_leaf() {
        return Err(Error::domain("a complete type class has no children"));
    }
    let r = prefix.remaining();
    let values: Vec<u64> = if prefix.data.len() == prefix.length - 1 {
        vec![r]
    } else {
        (0..=r).collect()
    };
    Ok(values
        .into_iter()
        .map(|v| {
            let mut data = prefix.data.clone();
            data.push(v);
            TypePrefix { size: prefix.size, length: prefix.length, data }
        })
        .collect())
}

/// The children whose newly added entry is congruent to `k` modulo `m`.
///
/// Over k = 0..m-1 the results partition [`children`] exactly, which is the
/// basis for splitting enumeration across workers.
pub fn children_last_entry_mod(prefix: &TypePrefix, k: u64, m: u64) -> Result<Vec<TypePrefix>> {
    assert!(m >= 1 && k < m, "residue {k} must lie in 0..{m}");
    Ok(children(prefix)?
        .into_iter()
        .filter(|c| c.data.last().unwrap() % m == k)
        .collect())
}

/// Invokes `processor` once per complete type class descending from
/// `prefix`, in lexicographic order.
pub fn dfs_process<F: FnMut(&TypeClass)>(prefix: &TypePrefix, processor: &mut F) {
    let mut data = prefix.data.clone();
    let mut scratch = TypeClass { size: prefix.size, counts: vec![0; prefix.length] };
    let remaining = prefix.remaining();
    dfs_rec(prefix.length, remaining, &mut data, &mut scratch, processor);
}

fn dfs_rec<F: FnMut(&TypeClass)>(
    length: usize,
    remaining: u64,
    data: &mut Vec<u64>,
    scratch: &mut TypeClass,
    processor: &mut F,
) {
    if data.len() == length {
        scratch.counts.copy_from_slice(data);
        processor(scratch);
        return;
    }
    if data.len() == length - 1 {
        data.push(remaining);
        dfs_rec(length, 0, data, scratch, processor);
        data.pop();
        return;
    }
    for v in 0..=remaining {
        data.push(v);
        dfs_rec(length, remaining - v, data, scratch, processor);
        data.pop();
    }
}

/// The number of type classes of size N over n symbols: C(N + n - 1, n - 1).
///
/// Computed with checked 128-bit arithmetic; sizes whose count exceeds u128
/// are reported as a domain error.
pub fn count_types(size: u64, alphabet: usize) -> Result<u128> {
    if alphabet == 0 {
        return Err(Error::domain("alphabet must have at least one symbol"));
    }
    binomial_checked(size + alphabet as u64 - 1, alphabet as u64 - 1)
}

fn binomial_checked(n: u64, k: u64) -> Result<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Exact at every step: acc holds C(n, i) before the update.
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::domain(format!("binomial({n}, {k}) overflows u128")))?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

/// The probability that N independent draws from `p` produce exactly the
/// counts of `t`: the multinomial coefficient times the product of cell
/// probabilities, computed in log space.
///
/// If a zero-probability cell carries a positive count the result is an
/// exact 0.
pub fn emission_probability(t: &TypeClass, p: &[f64]) -> Result<f64> {
    Ok(emission_log_probability(t, p)?.map_or(0.0, f64::exp))
}

/// Log of [`emission_probability`], or `None` when the probability is an
/// exact 0.
pub fn emission_log_probability(t: &TypeClass, p: &[f64]) -> Result<Option<f64>> {
    if p.len() != t.counts.len() {
        return Err(Error::domain(format!(
            "distribution over {} symbols does not match {} counts",
            p.len(),
            t.counts.len()
        )));
    }
    let mut log = ln_gamma(t.size as f64 + 1.0);
    for (&c, &pi) in t.counts.iter().zip(p) {
        if c == 0 {
            continue;
        }
        if pi <= ZERO_CELL {
            return Ok(None);
        }
        log += c as f64 * pi.ln() - ln_gamma(c as f64 + 1.0);
    }
    Ok(Some(log))
}

/// Cross-check route for [`emission_probability`]: the number of sequences
/// in the class times exp(-N (H(p_T) + H(p_T || p))), with p_T the
/// empirical distribution.
///
/// Kept as an independent formula for validation; the log-space multinomial
/// is the primary path.
pub fn emission_probability_entropy_form(t: &TypeClass, p: &[f64]) -> Result<f64> {
    if p.len() != t.counts.len() {
        return Err(Error::domain(format!(
            "distribution over {} symbols does not match {} counts",
            p.len(),
            t.counts.len()
        )));
    }
    for (&c, &pi) in t.counts.iter().zip(p) {
        if c > 0 && pi <= ZERO_CELL {
            return Ok(0.0);
        }
    }
    let empirical = t.empirical();
    let mut log_class_size = ln_gamma(t.size as f64 + 1.0);
    for &c in &t.counts {
        log_class_size -= ln_gamma(c as f64 + 1.0);
    }
    let h = entropy_unchecked(&empirical);
    let d = kl_unchecked(&empirical, p);
    Ok((log_class_size - t.size as f64 * (h + d)).exp())
}
