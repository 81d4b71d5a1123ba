//! Typed intermediate representation of a parsed EAGLE schematic.
//!
//! Coordinates are millimeters throughout. The IR is immutable after
//! construction, serializable, and structurally comparable; parsing the
//! serialized form yields an identical document.

use crate::geometry::Rotation;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A complete, fully linked schematic document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchematicDoc {
    /// EAGLE file format version string, e.g. "6.5.0".
    pub version: String,
    /// Grid pitch converted to millimeters.
    pub grid_mm: f64,
    pub libraries: BTreeMap<String, Library>,
    pub parts: Vec<Part>,
    pub sheets: Vec<Sheet>,
}

impl SchematicDoc {
    pub fn library(&self, name: &str) -> Option<&Library> {
        self.libraries.get(name)
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }

    /// Look up the symbol a (part, gate) pair renders as.
    pub fn symbol_for(&self, part: &Part, gate_name: &str) -> Option<&SymbolDef> {
        let lib = self.library(&part.library)?;
        let ds = lib.devicesets.get(&part.deviceset)?;
        let gate = ds.gates.iter().find(|g| g.name == gate_name)?;
        lib.symbols.get(&gate.symbol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Library {
    pub name: String,
    pub symbols: BTreeMap<String, SymbolDef>,
    pub devicesets: BTreeMap<String, DeviceSet>,
}

/// A library symbol: drawing primitives plus pin definitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolDef {
    pub name: String,
    pub primitives: Vec<Primitive>,
    pub pins: Vec<PinDef>,
}

/// Graphic primitives a symbol or sheet may contain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Wire {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        width: f64,
        layer: u16,
    },
    Rect {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        layer: u16,
    },
    Circle {
        x: f64,
        y: f64,
        radius: f64,
        width: f64,
        layer: u16,
    },
    /// Circular arc expressed as its chord plus the included angle in
    /// degrees; positive curves counter-clockwise from (x1,y1) to (x2,y2).
    Arc {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        curve: f64,
        width: f64,
        layer: u16,
    },
    Text {
        x: f64,
        y: f64,
        size: f64,
        layer: u16,
        rotation: Rotation,
        mirror: bool,
        content: String,
    },
}

/// Pin stub length on the EAGLE 0.1-inch grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinLength {
    Point,
    Short,
    Middle,
    Long,
}

impl PinLength {
    /// Stub extent in millimeters.
    pub fn mm(self) -> f64 {
        match self {
            PinLength::Point => 0.0,
            PinLength::Short => 2.54,
            PinLength::Middle => 5.08,
            PinLength::Long => 7.62,
        }
    }
}

/// Which of a pin's labels are drawn next to the stub.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinVisible {
    Off,
    Pad,
    Pin,
    Both,
}

impl PinVisible {
    pub fn shows_pin_name(self) -> bool {
        matches!(self, PinVisible::Pin | PinVisible::Both)
    }

    pub fn shows_pad_name(self) -> bool {
        matches!(self, PinVisible::Pad | PinVisible::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinDef {
    pub name: String,
    /// Connection point, in symbol coordinates.
    pub x: f64,
    pub y: f64,
    pub length: PinLength,
    /// Electrical direction flag as written in the file ("io", "pas", ...).
    pub direction: String,
    pub visible: PinVisible,
    /// Stub direction: the stub extends from the anchor toward the body
    /// along the rotated +x axis.
    pub rotation: Rotation,
}

/// A gate maps a name to a symbol within a device set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub symbol: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSet {
    pub name: String,
    pub prefix: String,
    pub gates: Vec<Gate>,
    pub devices: BTreeMap<String, Device>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub name: String,
    pub package: Option<String>,
    pub connects: Vec<Connect>,
}

/// One symbol-pin-to-package-pad connection entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connect {
    pub gate: String,
    pub pin: String,
    pub pad: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub library: String,
    pub deviceset: String,
    pub device: String,
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sheet {
    /// Free-standing graphics and text outside any symbol.
    pub plain: Vec<Primitive>,
    pub instances: Vec<Instance>,
    pub nets: Vec<Net>,
}

/// Placement of one gate of one part on a sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub part: String,
    pub gate: String,
    pub x: f64,
    pub y: f64,
    pub rotation: Rotation,
    pub mirror: bool,
    pub smashed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub name: String,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub wires: Vec<WireSeg>,
    pub junctions: Vec<Junction>,
    pub labels: Vec<NetLabel>,
    pub pinrefs: Vec<PinRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireSeg {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub x: f64,
    pub y: f64,
}

/// Visible net-name label attached to a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetLabel {
    pub x: f64,
    pub y: f64,
    pub size: f64,
    pub rotation: Rotation,
    pub mirror: bool,
}

/// Reference from a net segment to a symbol pin.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PinRef {
    pub part: String,
    pub gate: String,
    pub pin: String,
}

impl SchematicDoc {
    /// Total pinref count across all sheets, pre-merge.
    pub fn pinref_count(&self) -> usize {
        self.sheets
            .iter()
            .flat_map(|s| &s.nets)
            .flat_map(|n| &n.segments)
            .map(|seg| seg.pinrefs.len())
            .sum()
    }

    /// True when no sheet places an instance or draws a wire.
    pub fn is_empty_drawing(&self) -> bool {
        self.sheets.iter().all(|s| {
            s.instances.is_empty()
                && s.nets.iter().all(|n| n.segments.iter().all(|seg| seg.wires.is_empty()))
                && !s
                    .plain
                    .iter()
                    .any(|p| matches!(p, Primitive::Wire { .. } | Primitive::Arc { .. }))
        })
    }
}
