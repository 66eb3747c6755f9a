//! Bipartite transportation networks and Edmonds–Karp max flow on
//! integer-scaled capacities.

use std::collections::VecDeque;

use crate::tolerance;

/// Sources with supplies, sinks with demands, and the allowed source→sink edges.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    pub supplies: Vec<f64>,
    pub demands: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
}

/// Max-flow value and the flow carried by each entry of `edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub value: f64,
    pub edge_flows: Vec<f64>,
}

fn scaled(x: f64) -> u64 {
    (x.max(0.0) * tolerance::FLOW_SCALE).round() as u64
}

struct Graph {
    to: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    fn new(nodes: usize) -> Self {
        Self {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds `u → v` and its residual twin; returns the forward arc id.
    fn add(&mut self, u: usize, v: usize, cap: u64) -> usize {
        let id = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0u64;
        loop {
            let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &arc in &self.adj[u] {
                    let v = self.to[arc];
                    if !seen[v] && self.cap[arc] > 0 {
                        seen[v] = true;
                        parent[v] = Some(arc);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = u64::MAX;
            let mut v = t;
            while let Some(arc) = parent[v] {
                bottleneck = bottleneck.min(self.cap[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = t;
            while let Some(arc) = parent[v] {
                self.cap[arc] -= bottleneck;
                self.cap[arc ^ 1] += bottleneck;
                v = self.to[arc ^ 1];
            }
            total += bottleneck;
        }
    }
}

/// Solves the network with capacities scaled by `FLOW_SCALE` and rounded.
/// Each source→sink edge carries at most the source's supply.
pub fn solve(net: &FlowNetwork) -> FlowSolution {
    let (ns, nt) = (net.supplies.len(), net.demands.len());
    let source = ns + nt;
    let sink = source + 1;
    let mut g = Graph::new(ns + nt + 2);
    for (i, &q) in net.supplies.iter().enumerate() {
        g.add(source, i, scaled(q));
    }
    for (j, &p) in net.demands.iter().enumerate() {
        g.add(ns + j, sink, scaled(p));
    }
    let arcs: Vec<usize> = net
        .edges
        .iter()
        .map(|&(i, j)| g.add(i, ns + j, scaled(net.supplies[i])))
        .collect();
    let value = g.max_flow(source, sink);
    // flow on a forward arc is the capacity gained by its residual twin
    let edge_flows = arcs
        .iter()
        .map(|&arc| g.cap[arc ^ 1] as f64 / tolerance::FLOW_SCALE)
        .collect();
    FlowSolution {
        value: value as f64 / tolerance::FLOW_SCALE,
        edge_flows,
    }
}

pub fn max_flow(net: &FlowNetwork) -> f64 {
    solve(net).value
}
