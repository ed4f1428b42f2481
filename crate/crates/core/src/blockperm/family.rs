use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{BlockError, EventualRule};
use crate::perm::{generate_group, Perm};

const DEFAULT_MAX_ORDER: usize = 100_000;

/// One explicit block: its length and generators of `D_n` in local positions `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub size: usize,
    #[serde(default)]
    pub generators: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct BlockFamilyRepr {
    entries: Vec<BlockEntry>,
    eventual_size: usize,
    eventual: EventualRule,
    #[serde(default = "default_max_order")]
    max_order: usize,
}

fn default_max_order() -> usize {
    DEFAULT_MAX_ORDER
}

/// Blocks `0..M` are explicit; block `n >= M` has length `eventual_size` and group
/// trivial or `D_{n-T}` (periodic rule). Cutpoints start at `k_0 = 0`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "BlockFamilyRepr", into = "BlockFamilyRepr")]
pub struct BlockFamily {
    entries: Vec<BlockEntry>,
    eventual_size: usize,
    eventual: EventualRule,
    max_order: usize,
    cutpoints: Vec<i64>,
    groups: Vec<OnceLock<Result<Arc<Vec<Perm>>, BlockError>>>,
}

impl Clone for BlockFamily {
    fn clone(&self) -> Self {
        BlockFamily {
            entries: self.entries.clone(),
            eventual_size: self.eventual_size,
            eventual: self.eventual,
            max_order: self.max_order,
            cutpoints: self.cutpoints.clone(),
            groups: self.groups.clone(),
        }
    }
}

impl PartialEq for BlockFamily {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
            && self.eventual_size == other.eventual_size
            && self.eventual == other.eventual
            && self.max_order == other.max_order
    }
}

impl Eq for BlockFamily {}

impl TryFrom<BlockFamilyRepr> for BlockFamily {
    type Error = BlockError;

    fn try_from(r: BlockFamilyRepr) -> Result<Self, BlockError> {
        let mut f = BlockFamily::new(r.entries, r.eventual_size, r.eventual)?;
        f.max_order = r.max_order;
        Ok(f)
    }
}

impl From<BlockFamily> for BlockFamilyRepr {
    fn from(f: BlockFamily) -> Self {
        BlockFamilyRepr {
            entries: f.entries,
            eventual_size: f.eventual_size,
            eventual: f.eventual,
            max_order: f.max_order,
        }
    }
}

impl BlockFamily {
    pub fn new(
        mut entries: Vec<BlockEntry>,
        eventual_size: usize,
        eventual: EventualRule,
    ) -> Result<Self, BlockError> {
        let bad = |msg: String| Err(BlockError::Family(msg));
        if eventual_size == 0 || entries.iter().any(|e| e.size == 0) {
            return bad("blocks must be non-empty".into());
        }
        for (n, entry) in entries.iter_mut().enumerate() {
            for g in entry.generators.iter_mut() {
                if g.degree() > entry.size {
                    return bad(format!(
                        "generator {g} of D_{n} leaves its block of size {}",
                        entry.size
                    ));
                }
                *g = g.extend(entry.size);
                if !g.is_even() {
                    return bad(format!("generator {g} of D_{n} is odd"));
                }
            }
        }
        if let EventualRule::Periodic { period } = eventual {
            let m = entries.len() as u64;
            if period == 0 || period > m {
                return bad(format!(
                    "period {period} must lie between 1 and the {m} explicit blocks"
                ));
            }
            if entries[(m - period) as usize..]
                .iter()
                .any(|e| e.size != eventual_size)
            {
                return bad("periodically repeated blocks must have the eventual size".into());
            }
        }
        let mut cutpoints = vec![0i64];
        for e in &entries {
            cutpoints.push(cutpoints.last().unwrap() + e.size as i64);
        }
        let groups = entries.iter().map(|_| OnceLock::new()).collect();
        Ok(BlockFamily {
            entries,
            eventual_size,
            eventual,
            max_order: DEFAULT_MAX_ORDER,
            cutpoints,
            groups,
        })
    }

    /// Blocks of constant length `size`, each carrying `Alt(size)`.
    pub fn uniform_alternating(size: usize) -> Result<Self, BlockError> {
        let generators = (2..size as i64)
            .map(|j| Perm::from_cycles(size, &[vec![0, 1, j]]))
            .collect::<Result<Vec<_>, _>>()?;
        BlockFamily::new(
            vec![BlockEntry { size, generators }],
            size,
            EventualRule::Periodic { period: 1 },
        )
    }

    pub fn explicit_blocks(&self) -> usize {
        self.entries.len()
    }

    pub fn period(&self) -> u64 {
        match self.eventual {
            EventualRule::Identity => 1,
            EventualRule::Periodic { period } => period,
        }
    }

    pub fn base_index(&self, n: u64) -> Option<usize> {
        let m = self.entries.len() as u64;
        if n < m {
            return Some(n as usize);
        }
        match self.eventual {
            EventualRule::Identity => None,
            EventualRule::Periodic { period } => {
                let start = m - period;
                Some((start + (n - start) % period) as usize)
            }
        }
    }

    /// `k_n`.
    pub fn cutpoint(&self, n: u64) -> i64 {
        let m = self.entries.len() as u64;
        if n <= m {
            self.cutpoints[n as usize]
        } else {
            self.cutpoints[m as usize] + ((n - m) * self.eventual_size as u64) as i64
        }
    }

    pub fn block_size(&self, n: u64) -> usize {
        self.entries
            .get(n as usize)
            .map_or(self.eventual_size, |e| e.size)
    }

    /// The block containing `x >= 0` and the offset of `x` inside it.
    pub fn locate(&self, x: i64) -> (u64, usize) {
        debug_assert!(x >= 0);
        let m = self.entries.len();
        let k_m = self.cutpoints[m];
        if x >= k_m {
            let n = (x - k_m) as u64 / self.eventual_size as u64;
            let offset = (x - k_m) as usize % self.eventual_size;
            return (m as u64 + n, offset);
        }
        let n = self.cutpoints.partition_point(|&k| k <= x) - 1;
        (n as u64, (x - self.cutpoints[n]) as usize)
    }

    /// `D_n` as a sorted list.
    pub fn group(&self, n: u64) -> Result<Arc<Vec<Perm>>, BlockError> {
        let Some(i) = self.base_index(n) else {
            return Ok(Arc::new(vec![Perm::identity(self.block_size(n))]));
        };
        self.groups[i]
            .get_or_init(|| {
                let e = &self.entries[i];
                generate_group(e.size, &e.generators, self.max_order)
                    .map(Arc::new)
                    .map_err(|_| BlockError::TooLarge {
                        index: i as u64,
                        bound: self.max_order,
                    })
            })
            .clone()
    }

    pub fn contains(&self, n: u64, perm: &Perm) -> Result<bool, BlockError> {
        if perm.degree() != self.block_size(n) {
            return Ok(false);
        }
        if perm.is_identity() {
            return Ok(true);
        }
        Ok(self.group(n)?.binary_search(perm).is_ok())
    }

    /// First block index past which block sizes and groups repeat with `period()`.
    pub fn stable_from(&self) -> u64 {
        let m = self.entries.len() as u64;
        match self.eventual {
            EventualRule::Identity => m,
            EventualRule::Periodic { period } => m - period,
        }
    }
}
