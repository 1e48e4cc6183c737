use serde::{Deserialize, Serialize};
use twcut::driver::{KindStats, StateStats};
use twcut::graph::{EdgeSet, Graph};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub e: usize,
    pub width: usize,
    /// `min-fill`, `file`, or `generated`.
    pub decomposition: String,
    pub nice_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub h: Option<u64>,
    pub k: u64,
    pub family: Option<String>,
    pub mode: Option<String>,
    pub weights: bool,
    pub limits: bool,
    pub costs: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub decompose_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub nodes: usize,
    pub total: usize,
    pub max: usize,
}

impl From<KindStats> for KindCounts {
    fn from(k: KindStats) -> Self {
        KindCounts {
            nodes: k.nodes,
            total: k.total_states,
            max: k.max_states,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct States {
    pub leaf: KindCounts,
    pub introduce: KindCounts,
    pub forget: KindCounts,
    pub join: KindCounts,
    pub max: usize,
    pub total: usize,
}

impl From<&StateStats> for States {
    fn from(s: &StateStats) -> Self {
        let [leaf, introduce, forget, join] = s.by_kind.map(KindCounts::from);
        States {
            leaf,
            introduce,
            forget,
            join,
            max: s.max_states(),
            total: s.total_states(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub instance: Instance,
    pub problem: Problem,
    pub optimum: Option<u64>,
    pub feasible: bool,
    pub witness: Option<Vec<[String; 2]>>,
    pub time_ms: Timing,
    pub states: States,
}

pub fn named_edges(g: &Graph, set: &EdgeSet) -> Vec<[String; 2]> {
    set.iter()
        .map(|(u, v)| [g.name(u).to_string(), g.name(v).to_string()])
        .collect()
}

impl RunReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        let i = &self.instance;
        let p = &self.problem;
        out += &format!(
            "instance     n={} e={} width={} ({}) nice-nodes={}\n",
            i.n, i.e, i.width, i.decomposition, i.nice_nodes
        );
        match (&p.family, p.h) {
            (Some(f), _) => {
                out += &format!(
                    "family       {} ({})\n",
                    f,
                    p.mode.as_deref().unwrap_or("subgraph")
                )
            }
            (None, Some(h)) => out += &format!("bound        h={h}\n"),
            _ => {}
        }
        let mut extras = Vec::new();
        for (on, name) in [
            (p.weights, "weights"),
            (p.limits, "limits"),
            (p.costs, "costs"),
        ] {
            if on {
                extras.push(name);
            }
        }
        if !extras.is_empty() {
            out += &format!("annotations  {}\n", extras.join(", "));
        }
        out += &format!("budget       k={}\n", p.k);
        match self.optimum {
            Some(o) => out += &format!("optimum      {o}\n"),
            None => out += "optimum      infeasible within budget\n",
        }
        let s = &self.states;
        out += &format!(
            "states       total={} max={} (leaf {}, introduce {}, forget {}, join {})\n",
            s.total, s.max, s.leaf.total, s.introduce.total, s.forget.total, s.join.total
        );
        let t = &self.time_ms;
        out += &format!(
            "time         {:.1} ms (decompose {:.1}, solve {:.1})\n",
            t.total_ms, t.decompose_ms, t.solve_ms
        );
        if let Some(w) = &self.witness {
            out += &format!("witness      {} edges\n", w.len());
            for [u, v] in w {
                out += &format!("  {u} {v}\n");
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub n: Option<usize>,
    pub e: Option<usize>,
    pub width: Option<usize>,
    pub h: u64,
    pub optimum: Option<u64>,
    pub feasible: Option<bool>,
    pub time_ms: Option<f64>,
    pub max_states: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub rows: Vec<BenchRow>,
    pub total_ms: f64,
}

fn cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".to_string(), |v| v.to_string())
}

impl BenchReport {
    pub fn table(&self) -> String {
        let header = [
            "instance",
            "v",
            "e",
            "tw",
            "h",
            "min-del",
            "time-ms",
            "max-states",
            "status",
        ];
        let mut rows: Vec<[String; 9]> = vec![header.map(String::from)];
        for r in &self.rows {
            let status = match (&r.error, r.feasible) {
                (Some(e), _) => format!("error: {e}"),
                (None, Some(true)) => "ok".into(),
                (None, _) => "infeasible".into(),
            };
            rows.push([
                r.name.clone(),
                cell(&r.n),
                cell(&r.e),
                cell(&r.width),
                r.h.to_string(),
                cell(&r.optimum),
                r.time_ms.map_or("-".into(), |t| format!("{t:.1}")),
                cell(&r.max_states),
                status,
            ]);
        }
        let mut widths = [0usize; 9];
        for row in &rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| {
                    if i == 0 || i == 8 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            out += line.join("  ").trim_end();
            out += "\n";
        }
        out += &format!(
            "{} instances, {:.1} ms total\n",
            self.rows.len(),
            self.total_ms
        );
        out
    }
}
