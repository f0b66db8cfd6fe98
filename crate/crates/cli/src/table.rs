//! Step tables of one enumeration.
//!
//! One row per atom reaching the root, plus one per branch cut by a false
//! condition. Columns are the values bound on non-certain elementary nodes,
//! then the atom travelling along each edge, then the atom leaving the root.
//! A chain of tuple cells is shown as one n-ary tuple: atoms into inner cells
//! are attributed to the outermost cell and cell-to-cell edges are hidden, as
//! are edges out of certain nodes.

use std::collections::HashMap;

use statues::dsl::CompiledModel;
use statues::engine::{Edge, EventKind, LiveAtom, Trace};
use statues::{format_prob, NodeId, NodeKind, Pex, Prob, ProbFormat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceTable {
    pub headers: Vec<String>,
    /// Cells per row, aligned with `headers`; the first is the row number.
    pub rows: Vec<Vec<String>>,
}

pub const EMPTY: &str = "-";

enum Column {
    Binding(NodeId),
    Edge { child: NodeId, edge: Edge },
    Root(NodeId),
}

fn kind_symbol(node: &Pex) -> String {
    match node.kind() {
        NodeKind::Elementary(pmf) if pmf.is_certain() => pmf.values().next().map(ToString::to_string).unwrap_or_default(),
        NodeKind::Elementary(pmf) => {
            let values: Vec<String> = pmf.values().map(ToString::to_string).collect();
            format!("{{{}}}", values.join(", "))
        }
        NodeKind::Tuple { .. } => "<>".into(),
        NodeKind::Functional { func, .. } => func.name().into(),
        NodeKind::Conditional { .. } => "given".into(),
        NodeKind::MultiConditional { .. } => "given[]".into(),
        NodeKind::Table { .. } => "table".into(),
        NodeKind::MultiFunctional { .. } => "apply".into(),
        NodeKind::Mixture(_) => "mix".into(),
    }
}

fn atom(a: &LiveAtom<Prob>, fmt: ProbFormat) -> String {
    format!("({}, {})", a.value, format_prob(&a.prob, fmt))
}

/// Builds the table of `trace`, an enumeration of `root` compiled in `model`.
pub fn trace_table(trace: &Trace<Prob>, root: &Pex, model: &CompiledModel, fmt: ProbFormat) -> TraceTable {
    let nodes = root.reachable();
    let by_id: HashMap<NodeId, &Pex> = nodes.iter().map(|n| (n.id(), n)).collect();
    let label = |id: NodeId| match model.label(id) {
        Some(name) => name.to_string(),
        None => kind_symbol(by_id[&id]),
    };

    // Inner tuple cell -> the cell whose tail it is.
    let mut outer: HashMap<NodeId, NodeId> = HashMap::new();
    for n in &nodes {
        if let NodeKind::Tuple { tail, .. } = n.kind() {
            if matches!(tail.kind(), NodeKind::Tuple { .. }) {
                outer.entry(tail.id()).or_insert(n.id());
            }
        }
    }
    let chain_head = |mut id: NodeId| {
        while let Some(&up) = outer.get(&id) {
            id = up;
        }
        id
    };

    let mut columns: Vec<Column> = nodes
        .iter()
        .filter(|n| n.pmf().is_some_and(|p| p.len() > 1))
        .map(|n| Column::Binding(n.id()))
        .collect();
    let mut seen: Vec<(NodeId, Edge)> = Vec::new();
    for e in &trace.events {
        let EventKind::Yield { to: Some(edge), .. } = &e.kind else {
            continue;
        };
        let child = &by_id[&e.node];
        let cell_to_cell = outer.get(&e.node) == Some(&edge.parent);
        if child.is_certain() || cell_to_cell || seen.contains(&(e.node, *edge)) {
            continue;
        }
        seen.push((e.node, *edge));
        columns.push(Column::Edge { child: e.node, edge: *edge });
    }
    columns.push(Column::Root(root.id()));

    let mut headers = vec!["#".to_string()];
    headers.extend(columns.iter().map(|c| match c {
        Column::Binding(id) => label(*id),
        Column::Edge { child, edge } => format!("{}->{}", label(*child), label(chain_head(edge.parent))),
        Column::Root(id) => format!("{}->", label(*id)),
    }));

    let rows = trace
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![format!("#{}", row.index)];
            cells.extend(columns.iter().map(|c| {
                let found = match c {
                    Column::Binding(id) => {
                        return row
                            .bindings
                            .iter()
                            .find(|(n, _)| n == id)
                            .map_or(EMPTY.to_string(), |(_, v)| v.to_string())
                    }
                    Column::Edge { child, edge } => row.atom_on(*child, Some(*edge)),
                    Column::Root(_) => row.root_atom(),
                };
                found.map_or(EMPTY.to_string(), |a| atom(a, fmt))
            }));
            cells
        })
        .collect();
    TraceTable { headers, rows }
}

/// Width to wrap tables at: `$COLUMNS` when set, else 120.
pub fn terminal_width() -> usize {
    std::env::var("COLUMNS")
        .ok()
        .and_then(|c| c.parse().ok())
        .filter(|&w| w >= 20)
        .unwrap_or(120)
}

impl TraceTable {
    /// The cells of column `header`, one per row, if it exists.
    pub fn column(&self, header: &str) -> Option<Vec<&str>> {
        let i = self.headers.iter().position(|h| h == header)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    /// Aligned text; columns that do not fit in `width` continue in further
    /// blocks, each repeating the row numbers.
    pub fn render(&self, width: usize) -> String {
        let len = |s: &str| s.chars().count();
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| len(&r[i]))
                    .chain([len(&self.headers[i])])
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        // Greedy split of the data columns into blocks.
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new()];
        let mut used = widths[0];
        for i in 1..widths.len() {
            let cur = blocks.last_mut().expect("nonempty");
            if !cur.is_empty() && used + 3 + widths[i] > width {
                blocks.push(Vec::new());
                used = widths[0];
            }
            blocks.last_mut().expect("nonempty").push(i);
            used += 3 + widths[i];
        }

        let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w - len(s)));
        let mut out = String::new();
        for (b, block) in blocks.iter().enumerate() {
            if b > 0 {
                out.push('\n');
            }
            let line = |cells: &[String]| {
                let mut parts = vec![pad(&cells[0], widths[0])];
                parts.extend(block.iter().map(|&i| pad(&cells[i], widths[i])));
                parts.join(" | ").trim_end().to_string()
            };
            out.push_str(&line(&self.headers));
            out.push('\n');
            let mut rule = vec!["-".repeat(widths[0])];
            rule.extend(block.iter().map(|&i| "-".repeat(widths[i])));
            out.push_str(&rule.join("-+-"));
            out.push('\n');
            for row in &self.rows {
                out.push_str(&line(row));
                out.push('\n');
            }
        }
        out
    }
}
