/// Largest bag the component solver accepts.
pub const MAX_BAG: usize = 12;

/// A partition of the bag (as a restricted-growth string over the sorted bag)
/// with a capacity per block, in first-appearance block order.
///
/// When per-vertex limits are active each block also carries a ceiling: the
/// smallest limit in the block's component seen so far, forgotten vertices
/// included. Without limits the ceilings are all zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentState {
    len: u8,
    rgs: [u8; MAX_BAG],
    capacity: [u16; MAX_BAG],
    ceiling: [u16; MAX_BAG],
}

impl ComponentState {
    pub(crate) fn empty() -> Self {
        ComponentState {
            len: 0,
            rgs: [0; MAX_BAG],
            capacity: [0; MAX_BAG],
            ceiling: [0; MAX_BAG],
        }
    }

    /// Canonical state from arbitrary block labels (`labels[i]` for bag
    /// position `i`, each label below 16) with per-label capacity and ceiling.
    pub(crate) fn from_labels(labels: &[u8], cap: &[(u16, u16); 16]) -> Self {
        let mut s = Self::empty();
        s.len = labels.len() as u8;
        let mut map = [u8::MAX; 16];
        let mut next = 0u8;
        for (i, &l) in labels.iter().enumerate() {
            if map[l as usize] == u8::MAX {
                map[l as usize] = next;
                s.capacity[next as usize] = cap[l as usize].0;
                s.ceiling[next as usize] = cap[l as usize].1;
                next += 1;
            }
            s.rgs[i] = map[l as usize];
        }
        s
    }

    pub(crate) fn from_parts(rgs: &[u8], capacity: &[u16], ceiling: &[u16]) -> Self {
        let mut s = Self::empty();
        s.len = rgs.len() as u8;
        s.rgs[..rgs.len()].copy_from_slice(rgs);
        s.capacity[..capacity.len()].copy_from_slice(capacity);
        s.ceiling[..ceiling.len()].copy_from_slice(ceiling);
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Block index of each bag position.
    pub fn partition(&self) -> &[u8] {
        &self.rgs[..self.len as usize]
    }

    pub fn block_count(&self) -> usize {
        self.partition()
            .iter()
            .map(|&b| b as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn capacities(&self) -> &[u16] {
        &self.capacity[..self.block_count()]
    }

    pub fn ceilings(&self) -> &[u16] {
        &self.ceiling[..self.block_count()]
    }

    /// Bag positions grouped by block.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.partition().iter().enumerate() {
            out[b as usize].push(i);
        }
        out
    }

    /// The same partition with capacities and ceilings cleared; keys join
    /// pairing.
    pub(crate) fn join_key(&self) -> ComponentState {
        let mut k = *self;
        k.capacity = [0; MAX_BAG];
        k.ceiling = [0; MAX_BAG];
        k
    }
}
