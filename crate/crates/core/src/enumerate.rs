//! Exhaustive enumeration of small structures up to isomorphism.
//!
//! Every labelled structure of a given size is encoded as a bit mask (one
//! bit per potential tuple) plus a constant assignment. A structure is
//! emitted iff its encoding is the least in its orbit under all
//! permutations of the universe, so each isomorphism class appears exactly
//! once, always with the same labelling.

use crate::canon::for_each_permutation;
use crate::error::{Error, Result};
use crate::structures::{letter_names, Structure, Vocabulary};

/// Largest number of potential tuples (mask bits) accepted per size.
pub const BIT_LIMIT: usize = 25;

struct Layout {
    size: usize,
    /// (offset, arity) per relation.
    relations: Vec<(usize, usize)>,
    bits: usize,
}

impl Layout {
    fn new(vocab: &Vocabulary, size: usize) -> Result<Self> {
        let mut relations = Vec::new();
        let mut bits = 0usize;
        for (name, arity) in vocab.relations() {
            let cells = size.checked_pow(*arity as u32).filter(|&c| c <= BIT_LIMIT);
            let Some(cells) = cells else {
                return Err(Error::CapExceeded(format!(
                    "relation {name} of arity {arity} over {size} elements exceeds {BIT_LIMIT} tuple slots"
                )));
            };
            relations.push((bits, *arity));
            bits += cells;
        }
        if bits > BIT_LIMIT {
            return Err(Error::CapExceeded(format!(
                "{bits} tuple slots over {size} elements exceed the enumeration limit {BIT_LIMIT}"
            )));
        }
        Ok(Layout { size, relations, bits })
    }

    fn decode(&self, code: usize, arity: usize) -> Vec<usize> {
        let mut t = vec![0; arity];
        let mut rest = code;
        for slot in t.iter_mut().rev() {
            *slot = rest % self.size;
            rest /= self.size;
        }
        t
    }

    fn encode(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.size + x)
    }

    /// Image of every mask bit under `perm`.
    fn bit_map(&self, perm: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.bits];
        for &(offset, arity) in &self.relations {
            let cells = self.size.pow(arity as u32);
            for code in 0..cells {
                let t: Vec<usize> = self.decode(code, arity).into_iter().map(|x| perm[x]).collect();
                out[offset + code] = offset + self.encode(&t);
            }
        }
        out
    }
}

/// Byte-wise lookup tables applying one permutation to a mask.
struct PermTable {
    chunks: Vec<[u32; 256]>,
}

impl PermTable {
    fn new(bit_map: &[usize]) -> Self {
        let nchunks = bit_map.len().div_ceil(8);
        let mut chunks = vec![[0u32; 256]; nchunks];
        for (c, table) in chunks.iter_mut().enumerate() {
            for (byte, slot) in table.iter_mut().enumerate() {
                let mut out = 0u32;
                for bit in 0..8 {
                    let src = c * 8 + bit;
                    if byte >> bit & 1 == 1 && src < bit_map.len() {
                        out |= 1 << bit_map[src];
                    }
                }
                *slot = out;
            }
        }
        PermTable { chunks }
    }

    #[inline]
    fn apply(&self, mask: u32) -> u32 {
        self.chunks
            .iter()
            .enumerate()
            .fold(0, |acc, (c, table)| acc | table[(mask >> (8 * c) & 0xff) as usize])
    }
}

/// Calls `f` with one representative of every isomorphism class of
/// structures over `vocab` with exactly `size` elements. Returns the count.
pub fn for_each_structure(vocab: &Vocabulary, size: usize, mut f: impl FnMut(Structure)) -> Result<u64> {
    let nconst = vocab.constants().len();
    if size == 0 {
        if nconst > 0 {
            return Ok(0);
        }
        f(Structure::empty(vocab.clone())?);
        return Ok(1);
    }
    let layout = Layout::new(vocab, size)?;
    let mut perms = Vec::new();
    let mut items: Vec<usize> = (0..size).collect();
    for_each_permutation(&mut items, &mut |p| perms.push(p.to_vec()));
    let identity: Vec<usize> = (0..size).collect();
    perms.retain(|p| *p != identity);
    let tables: Vec<PermTable> = perms.iter().map(|p| PermTable::new(&layout.bit_map(p))).collect();

    let names = letter_names(size);
    let vocab = std::sync::Arc::new(vocab.clone());
    let mut count = 0u64;
    let assignments = size.checked_pow(nconst as u32).ok_or_else(|| {
        Error::CapExceeded("too many constant assignments".into())
    })?;
    for code in 0..assignments {
        let consts = layout_digits(code, size, nconst);
        // Only assignments minimal in their orbit survive; the relevant
        // permutations for masks are then those fixing the assignment.
        let mut stabilizer = Vec::new();
        let mut minimal = true;
        for (p, table) in perms.iter().zip(&tables) {
            let image: Vec<usize> = consts.iter().map(|&c| p[c]).collect();
            match image.cmp(&consts) {
                std::cmp::Ordering::Less => {
                    minimal = false;
                    break;
                }
                std::cmp::Ordering::Equal => stabilizer.push(table),
                std::cmp::Ordering::Greater => {}
            }
        }
        if !minimal {
            continue;
        }
        let limit: u64 = 1 << layout.bits;
        for mask in 0..limit {
            let mask = mask as u32;
            if stabilizer.iter().any(|t| t.apply(mask) < mask) {
                continue;
            }
            let mut rels = Vec::with_capacity(layout.relations.len());
            for &(offset, arity) in &layout.relations {
                let cells = size.pow(arity as u32);
                let tuples = (0..cells)
                    .filter(|&c| mask >> (offset + c) & 1 == 1)
                    .map(|c| layout.decode(c, arity))
                    .collect();
                rels.push(tuples);
            }
            f(Structure::from_parts(vocab.clone(), names.clone(), rels, consts.clone())?);
            count += 1;
        }
    }
    Ok(count)
}

fn layout_digits(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
    out
}

/// All structures with at most `max_size` elements, one per isomorphism
/// class, ordered by size.
pub fn structures_up_to_iso(vocab: &Vocabulary, max_size: usize) -> Result<Vec<Structure>> {
    let mut out = Vec::new();
    for size in 0..=max_size {
        for_each_structure(vocab, size, |s| out.push(s))?;
    }
    Ok(out)
}
