//! Bottom-up evaluation of a DP over a nice decomposition.
//!
//! Both solvers implement [`Algebra`]; this module owns traversal order,
//! optional sibling parallelism, state-count statistics and the state cap.

use std::sync::Mutex;

use crate::decomposition::{NiceDecomposition, NodeKind};
use crate::error::{Error, Result};

pub trait Algebra: Sync {
    type Table: Send;

    fn leaf(&self, nd: &NiceDecomposition, t: usize) -> Result<Self::Table>;
    fn introduce(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        child: &Self::Table,
    ) -> Result<Self::Table>;
    fn forget(&self, nd: &NiceDecomposition, t: usize, child: &Self::Table) -> Result<Self::Table>;
    fn join(
        &self,
        nd: &NiceDecomposition,
        t: usize,
        left: &Self::Table,
        right: &Self::Table,
    ) -> Result<Self::Table>;
    fn size(table: &Self::Table) -> usize;
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Evaluate the two subtrees of each join concurrently.
    pub parallel: bool,
    /// Abort when any node holds more states than this.
    pub state_cap: Option<usize>,
    /// Keep every node's table instead of only the root's.
    pub keep_tables: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KindStats {
    pub nodes: usize,
    pub total_states: usize,
    pub max_states: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateStats {
    /// Table size per node id.
    pub per_node: Vec<usize>,
    /// Indexed leaf, introduce, forget, join.
    pub by_kind: [KindStats; 4],
}

impl StateStats {
    pub fn max_states(&self) -> usize {
        self.per_node.iter().copied().max().unwrap_or(0)
    }

    pub fn total_states(&self) -> usize {
        self.per_node.iter().sum()
    }

    fn from_sizes(nd: &NiceDecomposition, per_node: Vec<usize>) -> Self {
        let mut by_kind = [KindStats::default(); 4];
        for (t, &s) in per_node.iter().enumerate() {
            let k = &mut by_kind[match nd.node(t).kind {
                NodeKind::Leaf => 0,
                NodeKind::Introduce(_) => 1,
                NodeKind::Forget(_) => 2,
                NodeKind::Join => 3,
            }];
            k.nodes += 1;
            k.total_states += s;
            k.max_states = k.max_states.max(s);
        }
        StateStats { per_node, by_kind }
    }
}

pub struct RunOutput<T> {
    /// Per-node tables; only the root's is kept unless `keep_tables` was set.
    pub tables: Vec<Option<T>>,
    pub stats: StateStats,
}

impl<T> RunOutput<T> {
    pub fn root_table(&self) -> &T {
        self.tables
            .last()
            .and_then(Option::as_ref)
            .expect("root table is always kept")
    }
}

fn check_cap(t: usize, count: usize, cap: Option<usize>) -> Result<()> {
    match cap {
        Some(cap) if count > cap => Err(Error::StateCapExceeded {
            node: t,
            count,
            cap,
        }),
        _ => Ok(()),
    }
}

fn step<A: Algebra>(
    alg: &A,
    nd: &NiceDecomposition,
    t: usize,
    kids: &[&A::Table],
) -> Result<A::Table> {
    match nd.node(t).kind {
        NodeKind::Leaf => alg.leaf(nd, t),
        NodeKind::Introduce(_) => alg.introduce(nd, t, kids[0]),
        NodeKind::Forget(_) => alg.forget(nd, t, kids[0]),
        NodeKind::Join => alg.join(nd, t, kids[0], kids[1]),
    }
}

pub fn run<A: Algebra>(
    alg: &A,
    nd: &NiceDecomposition,
    opts: &RunOptions,
) -> Result<RunOutput<A::Table>> {
    if opts.parallel {
        run_parallel(alg, nd, opts)
    } else {
        run_sequential(alg, nd, opts)
    }
}

fn run_sequential<A: Algebra>(
    alg: &A,
    nd: &NiceDecomposition,
    opts: &RunOptions,
) -> Result<RunOutput<A::Table>> {
    let mut tables: Vec<Option<A::Table>> = (0..nd.len()).map(|_| None).collect();
    let mut sizes = vec![0; nd.len()];
    // Ids are post-ordered, so children are always ready.
    for t in 0..nd.len() {
        let children = &nd.node(t).children;
        let table = {
            let kids: Vec<&A::Table> = children
                .iter()
                .map(|&c| tables[c].as_ref().expect("child evaluated"))
                .collect();
            step(alg, nd, t, &kids)?
        };
        sizes[t] = A::size(&table);
        check_cap(t, sizes[t], opts.state_cap)?;
        if !opts.keep_tables {
            for &c in children {
                tables[c] = None;
            }
        }
        tables[t] = Some(table);
    }
    Ok(RunOutput {
        tables,
        stats: StateStats::from_sizes(nd, sizes),
    })
}

struct Shared<T> {
    kept: Mutex<Vec<Option<T>>>,
    sizes: Mutex<Vec<usize>>,
}

fn eval<A: Algebra>(
    alg: &A,
    nd: &NiceDecomposition,
    top: usize,
    opts: &RunOptions,
    shared: &Shared<A::Table>,
) -> Result<A::Table>
where
    A::Table: Send,
{
    let mut chain = vec![top];
    let mut bottom = top;
    while nd.node(bottom).children.len() == 1 {
        bottom = nd.node(bottom).children[0];
        chain.push(bottom);
    }
    chain.pop();
    let mut table = match nd.node(bottom).kind {
        NodeKind::Join => {
            let (l, r) = (nd.node(bottom).children[0], nd.node(bottom).children[1]);
            let (lt, rt) = rayon::join(
                || eval(alg, nd, l, opts, shared),
                || eval(alg, nd, r, opts, shared),
            );
            let (lt, rt) = (lt?, rt?);
            let out = alg.join(nd, bottom, &lt, &rt)?;
            if opts.keep_tables {
                let mut kept = shared.kept.lock().unwrap();
                kept[l] = Some(lt);
                kept[r] = Some(rt);
            }
            out
        }
        _ => alg.leaf(nd, bottom)?,
    };
    let mut t = bottom;
    loop {
        let size = A::size(&table);
        shared.sizes.lock().unwrap()[t] = size;
        check_cap(t, size, opts.state_cap)?;
        let Some(parent) = chain.pop() else { break };
        let next = step(alg, nd, parent, &[&table])?;
        if opts.keep_tables {
            shared.kept.lock().unwrap()[t] = Some(table);
        }
        table = next;
        t = parent;
    }
    Ok(table)
}

fn run_parallel<A: Algebra>(
    alg: &A,
    nd: &NiceDecomposition,
    opts: &RunOptions,
) -> Result<RunOutput<A::Table>> {
    let shared = Shared {
        kept: Mutex::new((0..nd.len()).map(|_| None).collect()),
        sizes: Mutex::new(vec![0; nd.len()]),
    };
    // Deep decompositions recurse once per join on a root path.
    let pool = rayon::ThreadPoolBuilder::new()
        .stack_size(128 << 20)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let root = pool.install(|| eval(alg, nd, nd.root(), opts, &shared))?;
    let mut tables = shared.kept.into_inner().unwrap();
    let root_id = nd.root();
    tables[root_id] = Some(root);
    let sizes = shared.sizes.into_inner().unwrap();
    Ok(RunOutput {
        tables,
        stats: StateStats::from_sizes(nd, sizes),
    })
}
