//! The spatially weighted heterogeneous netlist graph.
//!
//! Symbol nodes and pin nodes; membership edges are implied by each pin's
//! parent, and pin-pin connectivity edges are the pairwise closure of the
//! nets, each carrying the normalized distance between the two parent
//! symbols. The serialized document stores nets rather than the closure,
//! which is derived on demand and cached.

use crate::eagle::{NetDef, PlacedSymbol};
use crate::geometry::{Rect, Rotation};
use crate::render::AnnotationSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use thiserror::Error;

pub const GRAPH_SCHEMA: &str = "sch2net/graph/v1";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("geometry missing for {what}")]
    GeometryMissing { what: String },
    #[error("graph document violates schema: {0}")]
    SchemaViolation(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolNode {
    pub id: u32,
    pub name: String,
    pub value: String,
    #[serde(rename = "type")]
    pub symbol_type: String,
    pub orientation: Rotation,
    pub mirror: bool,
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinNode {
    pub id: u32,
    /// Owning symbol node id; the membership edge.
    pub parent: u32,
    pub pin_name: String,
    pub pad_name: String,
    /// Name of the net this pin participates in; empty when unconnected.
    pub net_name: String,
    pub bbox: Rect,
}

/// Net-induced pin-pin edge. Canonicalized with `pin_a < pin_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityEdge {
    pub pin_a: u32,
    pub pin_b: u32,
    pub net_name: String,
    pub spatial_weight: f64,
}

#[derive(Debug, Clone, Default)]
pub struct NetlistGraph {
    pub image_dims: (u32, u32),
    pub symbols: Vec<SymbolNode>,
    pub pins: Vec<PinNode>,
    /// Net name -> member pin ids, sorted.
    pub nets: BTreeMap<String, Vec<u32>>,
    closure: OnceLock<Vec<ConnectivityEdge>>,
}

impl PartialEq for NetlistGraph {
    fn eq(&self, other: &Self) -> bool {
        self.image_dims == other.image_dims
            && self.symbols == other.symbols
            && self.pins == other.pins
            && self.nets == other.nets
    }
}

impl NetlistGraph {
    pub fn new(
        image_dims: (u32, u32),
        symbols: Vec<SymbolNode>,
        pins: Vec<PinNode>,
        nets: BTreeMap<String, Vec<u32>>,
    ) -> Self {
        NetlistGraph { image_dims, symbols, pins, nets, closure: OnceLock::new() }
    }

    /// Membership edges as (symbol id, pin id) pairs, in pin id order.
    pub fn membership_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.pins.iter().map(|p| (p.parent, p.id))
    }

    /// The pairwise closure of all nets, derived once and cached.
    pub fn connectivity_edges(&self) -> &[ConnectivityEdge] {
        self.closure.get_or_init(|| {
            let mut edges = Vec::new();
            for (name, pin_ids) in &self.nets {
                edges.extend(self.closure_of(name, pin_ids));
            }
            edges.sort_by_key(|e| (e.pin_a, e.pin_b));
            edges
        })
    }

    /// Pairwise closure of one net: every unordered pin pair, weighted by
    /// the parent-symbol distance.
    pub fn net_closure(&self, net_name: &str) -> Vec<ConnectivityEdge> {
        match self.nets.get(net_name) {
            Some(pin_ids) => self.closure_of(net_name, pin_ids),
            None => Vec::new(),
        }
    }

    fn closure_of(&self, net_name: &str, pin_ids: &[u32]) -> Vec<ConnectivityEdge> {
        let mut edges = Vec::with_capacity(pin_ids.len() * (pin_ids.len().saturating_sub(1)) / 2);
        for (i, &a) in pin_ids.iter().enumerate() {
            for &b in &pin_ids[i + 1..] {
                let (pin_a, pin_b) = if a < b { (a, b) } else { (b, a) };
                let sym_a = &self.symbols[self.pins[pin_a as usize].parent as usize];
                let sym_b = &self.symbols[self.pins[pin_b as usize].parent as usize];
                edges.push(ConnectivityEdge {
                    pin_a,
                    pin_b,
                    net_name: net_name.to_string(),
                    spatial_weight: spatial_weight(&sym_a.bbox, &sym_b.bbox, self.image_dims),
                });
            }
        }
        edges
    }

    /// Size of each pin's connected component in the pin-pin graph;
    /// isolated pins have size 1.
    pub fn pin_component_sizes(&self) -> Vec<usize> {
        component_sizes(self.pins.len(), self.nets.values())
    }
}

/// Normalized center-to-center distance: Euclidean distance between the
/// bbox centers divided by the image diagonal, clamped to [0, 1].
/// Degenerate zero-size boxes act as their single point.
pub fn spatial_weight(bbox_a: &Rect, bbox_b: &Rect, image_dims: (u32, u32)) -> f64 {
    let (ax, ay) = bbox_a.center();
    let (bx, by) = bbox_b.center();
    let dist = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
    let diag = ((image_dims.0 as f64).powi(2) + (image_dims.1 as f64).powi(2)).sqrt();
    if diag == 0.0 {
        return 0.0;
    }
    (dist / diag).clamp(0.0, 1.0)
}

/// Connected-component sizes for `pin_count` pins grouped by the given
/// net membership lists (groups sharing a pin merge).
pub fn component_sizes<'a>(
    pin_count: usize,
    groups: impl Iterator<Item = &'a Vec<u32>>,
) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..pin_count).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for group in groups {
        for pair in group.windows(2) {
            let a = find(&mut parent, pair[0] as usize);
            let b = find(&mut parent, pair[1] as usize);
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut counts = vec![0usize; pin_count];
    for i in 0..pin_count {
        let root = find(&mut parent, i);
        counts[root] += 1;
    }
    (0..pin_count).map(|i| counts[find(&mut parent, i)]).collect()
}

/// Assemble the graph from resolved placements, merged nets, and the
/// pixel geometry of one render. Node ids are canonical: symbols sorted by
/// (part name, gate), pins by (parent, pin name).
pub fn build_graph(
    placed: &[PlacedSymbol],
    nets: &[NetDef],
    annotations: &AnnotationSet,
) -> Result<NetlistGraph, GraphError> {
    let mut order: Vec<&PlacedSymbol> = placed.iter().collect();
    order.sort_by(|a, b| (&a.part_name, &a.gate).cmp(&(&b.part_name, &b.gate)));

    let sym_annos: BTreeMap<&str, &crate::render::SymbolAnnotation> =
        annotations.symbols.iter().map(|s| (s.name.as_str(), s)).collect();
    let pin_annos: BTreeMap<(u32, &str), &crate::render::PinAnnotation> =
        annotations.pins.iter().map(|p| ((p.parent, p.pin_name.as_str()), p)).collect();

    let mut symbols = Vec::with_capacity(order.len());
    let mut key_to_sym: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    for (idx, p) in order.iter().enumerate() {
        let anno = sym_annos.get(p.display_name.as_str()).ok_or_else(|| {
            GraphError::GeometryMissing { what: format!("symbol {:?}", p.display_name) }
        })?;
        symbols.push(SymbolNode {
            id: idx as u32,
            name: p.display_name.clone(),
            value: p.value.clone(),
            symbol_type: p.symbol_type.clone(),
            orientation: p.transform.rotation,
            mirror: p.transform.mirror,
            bbox: anno.bbox,
        });
        key_to_sym.insert((p.part_name.as_str(), p.gate.as_str()), idx as u32);
    }

    // Pins in canonical order, taken from the annotation set (the render
    // derives them from the symbol definitions).
    let mut pins = Vec::new();
    let mut pin_lookup: BTreeMap<(u32, &str), u32> = BTreeMap::new();
    let mut sorted_pin_annos: Vec<&crate::render::PinAnnotation> =
        annotations.pins.iter().collect();
    sorted_pin_annos.sort_by(|a, b| (a.parent, &a.pin_name).cmp(&(b.parent, &b.pin_name)));
    for anno in sorted_pin_annos {
        if anno.parent as usize >= symbols.len() {
            return Err(GraphError::GeometryMissing {
                what: format!("pin {:?} references missing symbol {}", anno.pin_name, anno.parent),
            });
        }
        let id = pins.len() as u32;
        pins.push(PinNode {
            id,
            parent: anno.parent,
            pin_name: anno.pin_name.clone(),
            pad_name: anno.pad_name.clone(),
            net_name: String::new(),
            bbox: anno.bbox,
        });
        pin_lookup.insert((anno.parent, anno.pin_name.as_str()), id);
    }
    // The lookup key above borrows from `annotations`, matching the
    // lifetime of `pin_annos`; consistency between the two sets was
    // checked via the shared parent indices.
    drop(pin_annos);

    let mut net_map: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for net in nets {
        let mut member_ids = Vec::new();
        for pr in net.pinrefs() {
            let sym_id = key_to_sym.get(&(pr.part.as_str(), pr.gate.as_str())).ok_or_else(|| {
                GraphError::GeometryMissing {
                    what: format!("instance {}:{} referenced by net {:?}", pr.part, pr.gate, net.name),
                }
            })?;
            let pin_id = pin_lookup.get(&(*sym_id, pr.pin.as_str())).ok_or_else(|| {
                GraphError::GeometryMissing {
                    what: format!("pin {}:{}:{} referenced by net {:?}", pr.part, pr.gate, pr.pin, net.name),
                }
            })?;
            member_ids.push(*pin_id);
        }
        member_ids.sort_unstable();
        member_ids.dedup();
        if !member_ids.is_empty() {
            net_map.entry(net.name.clone()).or_default().extend(member_ids);
        } else {
            net_map.entry(net.name.clone()).or_default();
        }
    }
    for ids in net_map.values_mut() {
        ids.sort_unstable();
        ids.dedup();
    }
    // Drop wire-only nets from the graph: they connect no pins.
    net_map.retain(|_, ids| !ids.is_empty());

    // A pin belongs to at most one net; if a document connects one pin to
    // several nets, the alphabetically first wins deterministically.
    let mut graph = NetlistGraph::new(annotations.image_dims, symbols, pins, BTreeMap::new());
    let mut final_nets: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (name, ids) in &net_map {
        let mut kept = Vec::new();
        for &pin in ids {
            let slot = &mut graph.pins[pin as usize].net_name;
            if slot.is_empty() {
                *slot = name.clone();
                kept.push(pin);
            }
        }
        if !kept.is_empty() {
            final_nets.insert(name.clone(), kept);
        }
    }
    graph.nets = final_nets;
    validate_graph(&graph)?;
    Ok(graph)
}

fn validate_graph(g: &NetlistGraph) -> Result<(), GraphError> {
    let (w, h) = (g.image_dims.0 as i64, g.image_dims.1 as i64);
    for (i, s) in g.symbols.iter().enumerate() {
        if s.id != i as u32 {
            return Err(GraphError::Invalid(format!("symbol ids not sequential at {i}")));
        }
        if !s.bbox.is_ordered() || s.bbox.x0 < 0 || s.bbox.y0 < 0 || s.bbox.x1 > w || s.bbox.y1 > h
        {
            return Err(GraphError::Invalid(format!(
                "symbol {:?} bbox {:?} outside image {:?}",
                s.name, s.bbox, g.image_dims
            )));
        }
    }
    for (i, p) in g.pins.iter().enumerate() {
        if p.id != i as u32 {
            return Err(GraphError::Invalid(format!("pin ids not sequential at {i}")));
        }
        if p.parent as usize >= g.symbols.len() {
            return Err(GraphError::Invalid(format!("pin {i} has missing parent {}", p.parent)));
        }
        if !p.bbox.is_ordered() || p.bbox.x0 < 0 || p.bbox.y0 < 0 || p.bbox.x1 > w || p.bbox.y1 > h
        {
            return Err(GraphError::Invalid(format!(
                "pin {i} bbox {:?} outside image {:?}",
                p.bbox, g.image_dims
            )));
        }
    }
    for (name, ids) in &g.nets {
        for &id in ids {
            if id as usize >= g.pins.len() {
                return Err(GraphError::Invalid(format!("net {name:?} references missing pin {id}")));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonical document form

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    schema: String,
    image_dims: (u32, u32),
    symbols: Vec<SymbolNode>,
    pins: Vec<PinNode>,
    nets: BTreeMap<String, Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    connectivity: Option<Vec<EdgeDoc>>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: u32,
    b: u32,
    net: String,
    weight: f64,
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Canonical serialization: sorted ids, sorted nets, weights rounded to six
/// fractional digits when the derived closure is included.
pub fn serialize_graph(graph: &NetlistGraph, with_closure: bool) -> String {
    let doc = GraphDoc {
        schema: GRAPH_SCHEMA.to_string(),
        image_dims: graph.image_dims,
        symbols: graph.symbols.clone(),
        pins: graph.pins.clone(),
        nets: graph.nets.clone(),
        connectivity: with_closure.then(|| {
            graph
                .connectivity_edges()
                .iter()
                .map(|e| EdgeDoc {
                    a: e.pin_a,
                    b: e.pin_b,
                    net: e.net_name.clone(),
                    weight: round6(e.spatial_weight),
                })
                .collect()
        }),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("graph serialization");
    out.push('\n');
    out
}

/// Load a canonical graph document. The derived `connectivity` section, if
/// present, is ignored and recomputed on demand.
pub fn load_graph(text: &str) -> Result<NetlistGraph, GraphError> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| GraphError::SchemaViolation(e.to_string()))?;
    if doc.schema != GRAPH_SCHEMA {
        return Err(GraphError::SchemaViolation(format!(
            "unknown schema {:?}, expected {GRAPH_SCHEMA:?}",
            doc.schema
        )));
    }
    let graph = NetlistGraph::new(doc.image_dims, doc.symbols, doc.pins, doc.nets);
    validate_graph(&graph).map_err(|e| GraphError::SchemaViolation(e.to_string()))?;
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eagle::{PinRef, Segment};
    use crate::geometry::Transform;
    use crate::render::{AnnotationSet, PinAnnotation, SymbolAnnotation};

    fn placed(part: &str, value: &str) -> PlacedSymbol {
        PlacedSymbol {
            part_name: part.to_string(),
            gate: "G$1".to_string(),
            display_name: part.to_string(),
            library: "lib".to_string(),
            symbol: "SYM".to_string(),
            transform: Transform::translation(0.0, 0.0),
            value: value.to_string(),
            symbol_type: "R-US_".to_string(),
            pad_map: BTreeMap::new(),
        }
    }

    fn annotations_for(parts: &[&str], pins_per: usize) -> AnnotationSet {
        let mut set = AnnotationSet::empty((1000, 1000));
        for (i, name) in parts.iter().enumerate() {
            let x = 100 + 200 * i as i64;
            set.symbols.push(SymbolAnnotation {
                id: i as u32,
                bbox: Rect::new(x, 100, x + 80, 140),
                symbol_type: "R-US_".to_string(),
                orientation: Rotation::R0,
                mirror: false,
                name: name.to_string(),
                value: String::new(),
            });
            for k in 0..pins_per {
                set.pins.push(PinAnnotation {
                    id: (i * pins_per + k) as u32,
                    parent: i as u32,
                    bbox: Rect::new(x + 20 * k as i64, 95, x + 20 * k as i64 + 10, 105),
                    pin_name: format!("{}", k + 1),
                    pad_name: format!("{}", k + 1),
                });
            }
        }
        set
    }

    fn net(name: &str, refs: &[(&str, &str)]) -> NetDef {
        NetDef {
            name: name.to_string(),
            segments: vec![Segment {
                wires: vec![],
                junctions: vec![],
                labels: vec![],
                pinrefs: refs
                    .iter()
                    .map(|(part, pin)| PinRef {
                        part: part.to_string(),
                        gate: "G$1".to_string(),
                        pin: pin.to_string(),
                    })
                    .collect(),
            }],
        }
    }

    #[test]
    fn builds_counts_for_two_symbols_one_net() {
        let placed = vec![placed("R1", "10k"), placed("R2", "4k7")];
        let annos = annotations_for(&["R1", "R2"], 2);
        let nets = vec![net("N$1", &[("R1", "2"), ("R2", "1")])];
        let g = build_graph(&placed, &nets, &annos).unwrap();
        assert_eq!(g.symbols.len(), 2);
        assert_eq!(g.pins.len(), 4);
        assert_eq!(g.membership_edges().count(), 4);
        assert_eq!(g.connectivity_edges().len(), 1);
        let e = &g.connectivity_edges()[0];
        assert_eq!(e.net_name, "N$1");
        assert!(e.pin_a < e.pin_b);
        // Unconnected pins keep an empty net name.
        assert_eq!(g.pins.iter().filter(|p| p.net_name.is_empty()).count(), 2);
    }

    #[test]
    fn four_pin_net_closes_to_six_edges() {
        let placed = vec![placed("A1", ""), placed("A2", ""), placed("A3", ""), placed("A4", "")];
        let annos = annotations_for(&["A1", "A2", "A3", "A4"], 1);
        let nets = vec![net("BUS", &[("A1", "1"), ("A2", "1"), ("A3", "1"), ("A4", "1")])];
        let g = build_graph(&placed, &nets, &annos).unwrap();
        assert_eq!(g.connectivity_edges().len(), 6);
        assert_eq!(g.net_closure("BUS").len(), 6);
    }

    #[test]
    fn no_nets_means_no_connectivity() {
        let placed = vec![placed("R1", ""), placed("R2", "")];
        let annos = annotations_for(&["R1", "R2"], 2);
        let g = build_graph(&placed, &[], &annos).unwrap();
        assert_eq!(g.connectivity_edges().len(), 0);
        assert_eq!(g.membership_edges().count(), 4);
    }

    #[test]
    fn missing_symbol_annotation_is_geometry_missing() {
        let placed = vec![placed("R1", ""), placed("R2", "")];
        let annos = annotations_for(&["R1"], 2);
        let err = build_graph(&placed, &[], &annos).unwrap_err();
        assert!(matches!(err, GraphError::GeometryMissing { .. }), "{err}");
    }

    #[test]
    fn spatial_weight_examples() {
        let dims = (1000, 1000);
        let a = Rect::new(0, 0, 0, 0);
        let b = Rect::new(300, 400, 300, 400);
        let w = spatial_weight(&a, &b, dims);
        assert!((w - 0.35355339).abs() < 1e-6, "{w}");
        assert_eq!(spatial_weight(&a, &a, dims), 0.0);
        let corner = Rect::new(1000, 1000, 1000, 1000);
        assert!((spatial_weight(&a, &corner, dims) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spatial_weight_is_symmetric_and_bounded() {
        let dims = (640, 480);
        let a = Rect::new(10, 20, 50, 70);
        let b = Rect::new(600, 400, 640, 480);
        assert_eq!(spatial_weight(&a, &b, dims), spatial_weight(&b, &a, dims));
        assert!(spatial_weight(&a, &b, dims) <= 1.0);
    }

    #[test]
    fn closure_counts_match_binomial() {
        for k in [1usize, 2, 3, 5, 10] {
            let names: Vec<String> = (0..k).map(|i| format!("P{i:02}")).collect();
            let parts: Vec<&str> = names.iter().map(String::as_str).collect();
            let placed: Vec<_> = parts.iter().map(|p| super::tests::placed(p, "")).collect();
            let annos = annotations_for(&parts, 1);
            let refs: Vec<(&str, &str)> = parts.iter().map(|p| (*p, "1")).collect();
            let g = build_graph(&placed, &[net("N", &refs)], &annos).unwrap();
            assert_eq!(g.net_closure("N").len(), k * (k - 1) / 2, "k={k}");
        }
    }

    #[test]
    fn build_is_invariant_to_input_order() {
        let parts = ["B2", "A1", "C3"];
        let placed: Vec<_> = parts.iter().map(|p| super::tests::placed(p, "v")).collect();
        let annos = annotations_for(&["A1", "B2", "C3"], 2);
        let nets = vec![
            net("X", &[("B2", "1"), ("A1", "2")]),
            net("Y", &[("C3", "1"), ("B2", "2")]),
        ];
        let g1 = build_graph(&placed, &nets, &annos).unwrap();

        let mut placed_rev = placed.clone();
        placed_rev.reverse();
        let mut nets_rev = nets.clone();
        nets_rev.reverse();
        let g2 = build_graph(&placed_rev, &nets_rev, &annos).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn serialize_load_round_trip() {
        let placed = vec![placed("R1", "10k"), placed("R2", "4k7")];
        let annos = annotations_for(&["R1", "R2"], 2);
        let nets = vec![net("N$1", &[("R1", "2"), ("R2", "1")])];
        let g = build_graph(&placed, &nets, &annos).unwrap();
        let text = serialize_graph(&g, false);
        let loaded = load_graph(&text).unwrap();
        assert_eq!(g, loaded);
        assert_eq!(text, serialize_graph(&loaded, false));

        let with_closure = serialize_graph(&g, true);
        assert!(with_closure.contains("\"connectivity\""));
        assert_eq!(load_graph(&with_closure).unwrap(), g);
    }

    #[test]
    fn missing_pins_field_is_schema_violation() {
        let text = format!(
            "{{\"schema\":\"{GRAPH_SCHEMA}\",\"image_dims\":[10,10],\"symbols\":[],\"nets\":{{}}}}"
        );
        match load_graph(&text).unwrap_err() {
            GraphError::SchemaViolation(msg) => assert!(msg.contains("pins"), "{msg}"),
            other => panic!("expected SchemaViolation, got {other}"),
        }
    }

    #[test]
    fn empty_graph_round_trips() {
        let g = NetlistGraph::new((32, 32), vec![], vec![], BTreeMap::new());
        let text = serialize_graph(&g, false);
        let loaded = load_graph(&text).unwrap();
        assert_eq!(loaded.symbols.len(), 0);
        assert_eq!(loaded.pins.len(), 0);
        assert!(loaded.nets.is_empty());
    }

    #[test]
    fn component_sizes_merge_overlapping_groups() {
        let groups = vec![vec![0u32, 1], vec![1, 2], vec![4, 5]];
        let sizes = component_sizes(6, groups.iter());
        assert_eq!(sizes, vec![3, 3, 3, 1, 2, 2]);
    }
}
