//! Resolution of parsed documents into placement records and merged nets.

use super::model::*;
use crate::geometry::Transform;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("instance of part {part:?} references undeclared gate {gate:?}")]
    MissingGate { part: String, gate: String },
    #[error("dangling reference at {path}: {message}")]
    DanglingReference { path: String, message: String },
}

/// One placed gate: everything needed to draw it and to join it to nets.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedSymbol {
    pub part_name: String,
    pub gate: String,
    /// Designator as drawn: the part name, suffixed with the gate name for
    /// multi-gate parts ("U1A").
    pub display_name: String,
    pub library: String,
    pub symbol: String,
    /// Millimeter-space placement.
    pub transform: Transform,
    pub value: String,
    /// The deviceset name; serves as the symbol type / class label.
    pub symbol_type: String,
    /// Symbol pin name -> package pad name, from the device's connects.
    pub pad_map: BTreeMap<String, String>,
}

impl PlacedSymbol {
    pub fn pad_name(&self, pin: &str) -> &str {
        self.pad_map.get(pin).map(String::as_str).unwrap_or("")
    }
}

/// Join parts, gates, and devices into one placement record per
/// (part, gate) instance found on any sheet. Parts that are declared but
/// never instanced do not appear.
pub fn resolve_instances(doc: &SchematicDoc) -> Result<Vec<PlacedSymbol>, ResolveError> {
    let mut placed = Vec::new();
    for sheet in &doc.sheets {
        for inst in &sheet.instances {
            // Parse-time validation guarantees the part and its
            // library/deviceset/device exist.
            let part = doc.part(&inst.part).ok_or_else(|| ResolveError::DanglingReference {
                path: format!("instance[{}]", inst.part),
                message: "instance references undeclared part".into(),
            })?;
            let lib = &doc.libraries[&part.library];
            let ds = &lib.devicesets[&part.deviceset];
            let gate = ds.gates.iter().find(|g| g.name == inst.gate).ok_or_else(|| {
                ResolveError::MissingGate { part: inst.part.clone(), gate: inst.gate.clone() }
            })?;
            let device = &ds.devices[&part.device];
            let pad_map: BTreeMap<String, String> = device
                .connects
                .iter()
                .filter(|c| c.gate == inst.gate)
                .map(|c| (c.pin.clone(), c.pad.clone()))
                .collect();
            let display_name = if ds.gates.len() > 1 {
                format!("{}{}", part.name, inst.gate)
            } else {
                part.name.clone()
            };
            placed.push(PlacedSymbol {
                part_name: part.name.clone(),
                gate: inst.gate.clone(),
                display_name,
                library: part.library.clone(),
                symbol: gate.symbol.clone(),
                transform: Transform::new(inst.x, inst.y, inst.rotation, inst.mirror),
                value: part.value.clone().unwrap_or_default(),
                symbol_type: ds.name.clone(),
                pad_map,
            });
        }
    }
    Ok(placed)
}

/// A net merged across segments and sheets: same-named nets form one
/// electrical node space.
#[derive(Debug, Clone, PartialEq)]
pub struct NetDef {
    pub name: String,
    pub segments: Vec<Segment>,
}

impl NetDef {
    pub fn pinrefs(&self) -> impl Iterator<Item = &PinRef> {
        self.segments.iter().flat_map(|s| &s.pinrefs)
    }

    pub fn wires(&self) -> impl Iterator<Item = &WireSeg> {
        self.segments.iter().flat_map(|s| &s.wires)
    }

    pub fn pinref_count(&self) -> usize {
        self.segments.iter().map(|s| s.pinrefs.len()).sum()
    }
}

/// Collect nets from all sheets, merging same-named nets, with every
/// pinref re-checked against the document. Output is sorted by net name.
pub fn extract_nets(doc: &SchematicDoc) -> Result<Vec<NetDef>, ResolveError> {
    let mut merged: BTreeMap<String, Vec<Segment>> = BTreeMap::new();
    for (si, sheet) in doc.sheets.iter().enumerate() {
        for net in &sheet.nets {
            for (gi, seg) in net.segments.iter().enumerate() {
                for (pi, pr) in seg.pinrefs.iter().enumerate() {
                    let resolvable = doc
                        .part(&pr.part)
                        .and_then(|part| doc.symbol_for(part, &pr.gate))
                        .map(|sym| sym.pins.iter().any(|p| p.name == pr.pin))
                        .unwrap_or(false);
                    if !resolvable {
                        return Err(ResolveError::DanglingReference {
                            path: format!(
                                "sheet[{si}]/net[{}]/segment[{gi}]/pinref[{pi}]",
                                net.name
                            ),
                            message: format!(
                                "pinref {}:{}:{} does not resolve",
                                pr.part, pr.gate, pr.pin
                            ),
                        });
                    }
                }
            }
            merged.entry(net.name.clone()).or_default().extend(net.segments.iter().cloned());
        }
    }
    Ok(merged
        .into_iter()
        .map(|(name, segments)| NetDef { name, segments })
        .collect())
}
