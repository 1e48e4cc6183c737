//! Set partitions encoded as restricted-growth strings.
//!
//! A restricted-growth string `a` of length `n` has `a[0] = 0` and
//! `a[i] <= 1 + max(a[..i])`; position `i` belongs to block `a[i]`, and blocks
//! are numbered by first appearance. This is a canonical form, so equal
//! partitions have equal strings.

/// Bell number `B_n`: the number of partitions of an `n`-set.
pub fn bell(n: usize) -> u64 {
    // Bell triangle.
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let prev = *next.last().unwrap();
            next.push(prev.saturating_add(x));
        }
        row = next;
    }
    row[0]
}

/// All restricted-growth strings of length `n`, in lexicographic order.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, max: i32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=(max + 1) {
            cur.push(b as u8);
            rec(n, max.max(b), cur, out);
            cur.pop();
        }
    }
    rec(n, -1, &mut cur, &mut out);
    out
}

/// Number of blocks of a restricted-growth string.
pub fn block_count(rgs: &[u8]) -> usize {
    rgs.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
}

/// Renumbers block labels by first appearance, producing canonical form.
pub fn normalize(labels: &mut [u8]) {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    for x in labels.iter_mut() {
        if map[*x as usize] == u8::MAX {
            map[*x as usize] = next;
            next += 1;
        }
        *x = map[*x as usize];
    }
}

/// True when `rgs` is a valid restricted-growth string.
pub fn is_canonical(rgs: &[u8]) -> bool {
    let mut max = -1i32;
    for &b in rgs {
        if b as i32 > max + 1 {
            return false;
        }
        max = max.max(b as i32);
    }
    true
}
