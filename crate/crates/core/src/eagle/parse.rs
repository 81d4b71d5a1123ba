//! EAGLE 6+ XML schematic parser.
//!
//! Produces a fully linked [`SchematicDoc`] or an error; no partially
//! resolved document ever escapes. Unknown elements and attributes are
//! skipped with warning diagnostics so newer minor versions of the format
//! still parse.

use super::model::*;
use crate::diag::Diagnostic;
use crate::geometry::Rotation;
use roxmltree::Node;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    /// XML syntax error or a document that does not follow the schematic
    /// file shape (missing elements, missing attributes, bad numbers).
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    /// The `version` attribute names a pre-6 (binary era) release.
    #[error("unsupported EAGLE version {found:?} (need 6 or newer)")]
    UnsupportedVersion { found: String },
    /// A reference (part, library, deviceset, device, pinref) does not
    /// resolve to a declared target.
    #[error("dangling reference at {path}: {message}")]
    DanglingReference { path: String, message: String },
    /// A semantic invariant is violated (duplicate part names, duplicate
    /// pin names, duplicate nets in one sheet).
    #[error("invalid document at {path}: {message}")]
    InvalidDocument { path: String, message: String },
}

/// Parse result: the document plus any non-fatal diagnostics collected
/// along the way.
#[derive(Debug, Clone)]
pub struct ParsedSchematic {
    pub doc: SchematicDoc,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parse EAGLE `.sch` XML bytes into a validated document.
pub fn parse_schematic(bytes: &[u8]) -> Result<ParsedSchematic, ParseError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| ParseError::MalformedXml(format!("input is not UTF-8: {e}")))?;
    let xml = roxmltree::Document::parse(text)
        .map_err(|e| ParseError::MalformedXml(e.to_string()))?;

    let mut ctx = Ctx { diagnostics: Vec::new() };
    let root = xml.root_element();
    if root.tag_name().name() != "eagle" {
        return Err(ParseError::MalformedXml(format!(
            "root element is <{}>, expected <eagle>",
            root.tag_name().name()
        )));
    }
    let version = root.attribute("version").unwrap_or("").to_string();
    let major: Option<u32> = version.split('.').next().and_then(|v| v.parse().ok());
    match major {
        Some(m) if m >= 6 => {}
        _ => return Err(ParseError::UnsupportedVersion { found: version }),
    }

    let drawing = child_req(root, "drawing", "/eagle")?;
    let mut grid_mm = 2.54; // EAGLE default: 0.1 inch
    let mut schematic = None;
    for child in elements(drawing) {
        match child.tag_name().name() {
            "grid" => grid_mm = parse_grid(child, &mut ctx)?,
            "schematic" => schematic = Some(child),
            // Presentation-only blocks.
            "settings" | "layers" => {}
            other => ctx.unknown_element("/eagle/drawing", other),
        }
    }
    let schematic = schematic.ok_or_else(|| {
        ParseError::MalformedXml("no <schematic> element under /eagle/drawing".into())
    })?;

    let spath = "/eagle/drawing/schematic";
    ctx.check_attrs(schematic, spath, &["xreflabel", "xrefpart"]);

    let mut libraries = BTreeMap::new();
    let mut parts = Vec::new();
    let mut sheets = Vec::new();
    for child in elements(schematic) {
        match child.tag_name().name() {
            "libraries" => {
                for lib in elements_named(child, "library") {
                    let library = parse_library(lib, spath, &mut ctx)?;
                    libraries.insert(library.name.clone(), library);
                }
            }
            "parts" => {
                for (i, part) in elements_named(child, "part").enumerate() {
                    parts.push(parse_part(part, &format!("{spath}/parts/part[{i}]"), &mut ctx)?);
                }
            }
            "sheets" => {
                for (i, sheet) in elements_named(child, "sheet").enumerate() {
                    sheets.push(parse_sheet(
                        sheet,
                        &format!("{spath}/sheets/sheet[{i}]"),
                        &mut ctx,
                    )?);
                }
            }
            // Known blocks we do not model.
            "description" | "attributes" | "variantdefs" | "classes" | "errors" => {}
            other => ctx.unknown_element(spath, other),
        }
    }

    let doc = SchematicDoc { version, grid_mm, libraries, parts, sheets };
    validate(&doc, &mut ctx)?;
    Ok(ParsedSchematic { doc, diagnostics: ctx.diagnostics })
}

struct Ctx {
    diagnostics: Vec<Diagnostic>,
}

impl Ctx {
    fn unknown_element(&mut self, path: &str, name: &str) {
        self.diagnostics
            .push(Diagnostic::warning(path, format!("skipping unknown element <{name}>")));
    }

    fn check_attrs(&mut self, node: Node, path: &str, known: &[&str]) {
        for attr in node.attributes() {
            if !known.contains(&attr.name()) {
                self.diagnostics.push(Diagnostic::warning(
                    path,
                    format!("skipping unknown attribute `{}`", attr.name()),
                ));
            }
        }
    }
}

fn elements<'a, 'input>(node: Node<'a, 'input>) -> impl Iterator<Item = Node<'a, 'input>> {
    node.children().filter(|n| n.is_element())
}

fn elements_named<'a, 'input>(
    node: Node<'a, 'input>,
    name: &'a str,
) -> impl Iterator<Item = Node<'a, 'input>> {
    elements(node).filter(move |n| n.tag_name().name() == name)
}

fn child_req<'a, 'input>(
    node: Node<'a, 'input>,
    name: &str,
    path: &str,
) -> Result<Node<'a, 'input>, ParseError> {
    elements_named(node, name).next().ok_or_else(|| {
        ParseError::MalformedXml(format!("missing <{name}> element under {path}"))
    })
}

fn req_attr<'a>(node: Node<'a, '_>, name: &str, path: &str) -> Result<&'a str, ParseError> {
    node.attribute(name).ok_or_else(|| {
        ParseError::MalformedXml(format!(
            "<{}> at {path} is missing attribute `{name}`",
            node.tag_name().name()
        ))
    })
}

fn f64_attr(node: Node, name: &str, path: &str) -> Result<f64, ParseError> {
    let raw = req_attr(node, name, path)?;
    let v: f64 = raw.parse().map_err(|_| {
        ParseError::MalformedXml(format!("attribute `{name}`={raw:?} at {path} is not a number"))
    })?;
    if !v.is_finite() {
        return Err(ParseError::MalformedXml(format!(
            "attribute `{name}` at {path} is not finite"
        )));
    }
    Ok(v)
}

fn u16_attr(node: Node, name: &str, path: &str) -> Result<u16, ParseError> {
    let raw = req_attr(node, name, path)?;
    raw.parse().map_err(|_| {
        ParseError::MalformedXml(format!(
            "attribute `{name}`={raw:?} at {path} is not an integer"
        ))
    })
}

/// Parse an EAGLE rotation spec: optional `S` (spin) and `M` (mirror)
/// prefixes, then `R` plus an angle in degrees.
fn parse_rot(
    raw: &str,
    path: &str,
    quantize: bool,
    ctx: &mut Ctx,
) -> Result<(Rotation, bool), ParseError> {
    let mut rest = raw;
    let mut mirror = false;
    loop {
        if let Some(r) = rest.strip_prefix('S') {
            rest = r; // spin flag only affects label readability; ignored
        } else if let Some(r) = rest.strip_prefix('M') {
            mirror = true;
            rest = r;
        } else {
            break;
        }
    }
    let deg_str = rest.strip_prefix('R').ok_or_else(|| {
        ParseError::MalformedXml(format!("rotation {raw:?} at {path} is not of the form [S][M]R<deg>"))
    })?;
    let deg: f64 = deg_str.parse().map_err(|_| {
        ParseError::MalformedXml(format!("rotation {raw:?} at {path} has a non-numeric angle"))
    })?;
    let deg = deg.rem_euclid(360.0);
    let rotation = match Rotation::from_degrees(deg as u16) {
        Some(r) if deg == (deg as u16) as f64 => r,
        _ if quantize => {
            let quad = ((deg / 90.0).round() as u16 % 4) * 90;
            ctx.diagnostics.push(Diagnostic::warning(
                path,
                format!("rotation {raw:?} is not a multiple of 90°; rounding to R{quad}"),
            ));
            Rotation::from_degrees(quad).unwrap()
        }
        _ => {
            return Err(ParseError::MalformedXml(format!(
                "rotation {raw:?} at {path} must be one of R0/R90/R180/R270"
            )))
        }
    };
    Ok((rotation, mirror))
}

fn parse_grid(node: Node, ctx: &mut Ctx) -> Result<f64, ParseError> {
    ctx.check_attrs(
        node,
        "/eagle/drawing/grid",
        &[
            "distance", "unitdist", "unit", "style", "multiple", "display", "altdistance",
            "altunitdist", "altunit",
        ],
    );
    let distance = match node.attribute("distance") {
        Some(_) => f64_attr(node, "distance", "/eagle/drawing/grid")?,
        None => 0.1,
    };
    let factor = match node.attribute("unitdist").unwrap_or("inch") {
        "mm" => 1.0,
        "mic" => 0.001,
        "mil" => 0.0254,
        "inch" => 25.4,
        other => {
            ctx.diagnostics.push(Diagnostic::warning(
                "/eagle/drawing/grid",
                format!("unknown grid unit {other:?}; assuming inch"),
            ));
            25.4
        }
    };
    Ok(distance * factor)
}

fn parse_library(node: Node, parent: &str, ctx: &mut Ctx) -> Result<Library, ParseError> {
    let name = req_attr(node, "name", parent)?.to_string();
    let path = format!("{parent}/libraries/library[{name}]");
    ctx.check_attrs(node, &path, &["name", "urn"]);

    let mut symbols = BTreeMap::new();
    let mut devicesets = BTreeMap::new();
    for child in elements(node) {
        match child.tag_name().name() {
            "symbols" => {
                for sym in elements_named(child, "symbol") {
                    let symbol = parse_symbol(sym, &path, ctx)?;
                    symbols.insert(symbol.name.clone(), symbol);
                }
            }
            "devicesets" => {
                for ds in elements_named(child, "deviceset") {
                    let deviceset = parse_deviceset(ds, &path, ctx)?;
                    devicesets.insert(deviceset.name.clone(), deviceset);
                }
            }
            "description" | "packages" | "packages3d" => {}
            other => ctx.unknown_element(&path, other),
        }
    }
    Ok(Library { name, symbols, devicesets })
}

fn parse_symbol(node: Node, parent: &str, ctx: &mut Ctx) -> Result<SymbolDef, ParseError> {
    let name = req_attr(node, "name", parent)?.to_string();
    let path = format!("{parent}/symbols/symbol[{name}]");
    ctx.check_attrs(node, &path, &["name", "urn", "library_version", "library_locally_modified"]);

    let mut primitives = Vec::new();
    let mut pins = Vec::new();
    for child in elements(node) {
        match child.tag_name().name() {
            "pin" => pins.push(parse_pin(child, &path, ctx)?),
            "description" => {}
            name if is_primitive(name) => {
                if let Some(p) = parse_primitive(child, &path, ctx)? {
                    primitives.push(p);
                }
            }
            other => ctx.unknown_element(&path, other),
        }
    }

    let mut seen = BTreeSet::new();
    for pin in &pins {
        if !seen.insert(pin.name.as_str()) {
            return Err(ParseError::InvalidDocument {
                path,
                message: format!("duplicate pin name {:?}", pin.name),
            });
        }
    }
    Ok(SymbolDef { name, primitives, pins })
}

fn is_primitive(name: &str) -> bool {
    matches!(name, "wire" | "rectangle" | "circle" | "text")
}

/// Parse a graphic primitive; returns `None` when the element should be
/// skipped (already diagnosed).
fn parse_primitive(node: Node, path: &str, ctx: &mut Ctx) -> Result<Option<Primitive>, ParseError> {
    match node.tag_name().name() {
        "wire" => {
            ctx.check_attrs(
                node,
                path,
                &["x1", "y1", "x2", "y2", "width", "layer", "curve", "style", "cap", "extent"],
            );
            let x1 = f64_attr(node, "x1", path)?;
            let y1 = f64_attr(node, "y1", path)?;
            let x2 = f64_attr(node, "x2", path)?;
            let y2 = f64_attr(node, "y2", path)?;
            let width = f64_attr(node, "width", path)?;
            let layer = u16_attr(node, "layer", path)?;
            match node.attribute("curve") {
                Some(c) => {
                    let curve: f64 = c.parse().map_err(|_| {
                        ParseError::MalformedXml(format!(
                            "attribute `curve`={c:?} at {path} is not a number"
                        ))
                    })?;
                    Ok(Some(Primitive::Arc { x1, y1, x2, y2, curve, width, layer }))
                }
                None => Ok(Some(Primitive::Wire { x1, y1, x2, y2, width, layer })),
            }
        }
        "rectangle" => {
            ctx.check_attrs(node, path, &["x1", "y1", "x2", "y2", "layer", "rot"]);
            Ok(Some(Primitive::Rect {
                x1: f64_attr(node, "x1", path)?,
                y1: f64_attr(node, "y1", path)?,
                x2: f64_attr(node, "x2", path)?,
                y2: f64_attr(node, "y2", path)?,
                layer: u16_attr(node, "layer", path)?,
            }))
        }
        "circle" => {
            ctx.check_attrs(node, path, &["x", "y", "radius", "width", "layer"]);
            Ok(Some(Primitive::Circle {
                x: f64_attr(node, "x", path)?,
                y: f64_attr(node, "y", path)?,
                radius: f64_attr(node, "radius", path)?,
                width: f64_attr(node, "width", path)?,
                layer: u16_attr(node, "layer", path)?,
            }))
        }
        "text" => {
            ctx.check_attrs(
                node,
                path,
                &["x", "y", "size", "layer", "rot", "font", "ratio", "align", "distance"],
            );
            let (rotation, mirror) = match node.attribute("rot") {
                Some(r) => parse_rot(r, path, true, ctx)?,
                None => (Rotation::R0, false),
            };
            let content = node.text().unwrap_or("").trim().to_string();
            Ok(Some(Primitive::Text {
                x: f64_attr(node, "x", path)?,
                y: f64_attr(node, "y", path)?,
                size: f64_attr(node, "size", path)?,
                layer: u16_attr(node, "layer", path)?,
                rotation,
                mirror,
                content,
            }))
        }
        other => {
            ctx.unknown_element(path, other);
            Ok(None)
        }
    }
}

fn parse_pin(node: Node, parent: &str, ctx: &mut Ctx) -> Result<PinDef, ParseError> {
    let name = req_attr(node, "name", parent)?.to_string();
    let path = format!("{parent}/pin[{name}]");
    ctx.check_attrs(
        node,
        &path,
        &["name", "x", "y", "visible", "length", "direction", "function", "swaplevel", "rot"],
    );
    let length = match node.attribute("length").unwrap_or("long") {
        "point" => PinLength::Point,
        "short" => PinLength::Short,
        "middle" => PinLength::Middle,
        "long" => PinLength::Long,
        other => {
            return Err(ParseError::MalformedXml(format!(
                "pin length {other:?} at {path} is not one of point/short/middle/long"
            )))
        }
    };
    let visible = match node.attribute("visible").unwrap_or("both") {
        "off" => PinVisible::Off,
        "pad" => PinVisible::Pad,
        "pin" => PinVisible::Pin,
        "both" => PinVisible::Both,
        other => {
            return Err(ParseError::MalformedXml(format!(
                "pin visibility {other:?} at {path} is not one of off/pad/pin/both"
            )))
        }
    };
    let (rotation, mirror) = match node.attribute("rot") {
        Some(r) => parse_rot(r, &path, false, ctx)?,
        None => (Rotation::R0, false),
    };
    if mirror {
        ctx.diagnostics
            .push(Diagnostic::warning(&path, "ignoring mirror flag on pin rotation"));
    }
    Ok(PinDef {
        name,
        x: f64_attr(node, "x", &path)?,
        y: f64_attr(node, "y", &path)?,
        length,
        direction: node.attribute("direction").unwrap_or("io").to_string(),
        visible,
        rotation,
    })
}

fn parse_deviceset(node: Node, parent: &str, ctx: &mut Ctx) -> Result<DeviceSet, ParseError> {
    let name = req_attr(node, "name", parent)?.to_string();
    let path = format!("{parent}/devicesets/deviceset[{name}]");
    ctx.check_attrs(
        node,
        &path,
        &["name", "prefix", "uservalue", "urn", "library_version", "library_locally_modified"],
    );
    let prefix = node.attribute("prefix").unwrap_or("").to_string();

    let mut gates = Vec::new();
    let mut devices = BTreeMap::new();
    for child in elements(node) {
        match child.tag_name().name() {
            "gates" => {
                for gate in elements_named(child, "gate") {
                    ctx.check_attrs(gate, &path, &["name", "symbol", "x", "y", "addlevel", "swaplevel"]);
                    gates.push(Gate {
                        name: req_attr(gate, "name", &path)?.to_string(),
                        symbol: req_attr(gate, "symbol", &path)?.to_string(),
                        x: f64_attr(gate, "x", &path)?,
                        y: f64_attr(gate, "y", &path)?,
                    });
                }
            }
            "devices" => {
                for dev in elements_named(child, "device") {
                    let device = parse_device(dev, &path, ctx)?;
                    devices.insert(device.name.clone(), device);
                }
            }
            "description" | "spice" => {}
            other => ctx.unknown_element(&path, other),
        }
    }
    Ok(DeviceSet { name, prefix, gates, devices })
}

fn parse_device(node: Node, parent: &str, ctx: &mut Ctx) -> Result<Device, ParseError> {
    // Device names may legitimately be empty (single unnamed variant).
    let name = node.attribute("name").unwrap_or("").to_string();
    let path = format!("{parent}/devices/device[{name}]");
    ctx.check_attrs(node, &path, &["name", "package"]);
    let mut connects = Vec::new();
    for child in elements(node) {
        match child.tag_name().name() {
            "connects" => {
                for c in elements_named(child, "connect") {
                    ctx.check_attrs(c, &path, &["gate", "pin", "pad", "route"]);
                    connects.push(Connect {
                        gate: req_attr(c, "gate", &path)?.to_string(),
                        pin: req_attr(c, "pin", &path)?.to_string(),
                        pad: req_attr(c, "pad", &path)?.to_string(),
                    });
                }
            }
            "technologies" | "package3dinstances" => {}
            other => ctx.unknown_element(&path, other),
        }
    }
    Ok(Device { name, package: node.attribute("package").map(str::to_string), connects })
}

fn parse_part(node: Node, path: &str, ctx: &mut Ctx) -> Result<Part, ParseError> {
    ctx.check_attrs(
        node,
        path,
        &[
            "name",
            "library",
            "deviceset",
            "device",
            "value",
            "technology",
            "library_urn",
            "package3d_urn",
            "override_package3d_urn",
            "override_package_urn",
            "override_locally_modified",
        ],
    );
    Ok(Part {
        name: req_attr(node, "name", path)?.to_string(),
        library: req_attr(node, "library", path)?.to_string(),
        deviceset: req_attr(node, "deviceset", path)?.to_string(),
        device: req_attr(node, "device", path)?.to_string(),
        value: node.attribute("value").map(str::to_string),
    })
}

fn parse_sheet(node: Node, path: &str, ctx: &mut Ctx) -> Result<Sheet, ParseError> {
    let mut plain = Vec::new();
    let mut instances = Vec::new();
    let mut nets = Vec::new();
    for child in elements(node) {
        match child.tag_name().name() {
            "plain" => {
                let ppath = format!("{path}/plain");
                for prim in elements(child) {
                    if let Some(p) = parse_primitive(prim, &ppath, ctx)? {
                        plain.push(p);
                    }
                }
            }
            "instances" => {
                for (i, inst) in elements_named(child, "instance").enumerate() {
                    instances.push(parse_instance(
                        inst,
                        &format!("{path}/instances/instance[{i}]"),
                        ctx,
                    )?);
                }
            }
            "nets" => {
                for net in elements_named(child, "net") {
                    nets.push(parse_net(net, path, ctx)?);
                }
            }
            "description" | "busses" => {}
            other => ctx.unknown_element(path, other),
        }
    }

    let mut seen = BTreeSet::new();
    for net in &nets {
        if !seen.insert(net.name.as_str()) {
            return Err(ParseError::InvalidDocument {
                path: path.to_string(),
                message: format!("net {:?} declared twice in one sheet", net.name),
            });
        }
    }
    Ok(Sheet { plain, instances, nets })
}

fn parse_instance(node: Node, path: &str, ctx: &mut Ctx) -> Result<Instance, ParseError> {
    ctx.check_attrs(node, path, &["part", "gate", "x", "y", "smashed", "rot"]);
    let (rotation, mirror) = match node.attribute("rot") {
        Some(r) => parse_rot(r, path, false, ctx)?,
        None => (Rotation::R0, false),
    };
    Ok(Instance {
        part: req_attr(node, "part", path)?.to_string(),
        gate: req_attr(node, "gate", path)?.to_string(),
        x: f64_attr(node, "x", path)?,
        y: f64_attr(node, "y", path)?,
        rotation,
        mirror,
        smashed: node.attribute("smashed") == Some("yes"),
    })
}

fn parse_net(node: Node, sheet_path: &str, ctx: &mut Ctx) -> Result<Net, ParseError> {
    let name = req_attr(node, "name", sheet_path)?.to_string();
    let path = format!("{sheet_path}/nets/net[{name}]");
    ctx.check_attrs(node, &path, &["name", "class"]);

    let mut segments = Vec::new();
    for (si, seg) in elements_named(node, "segment").enumerate() {
        let seg_path = format!("{path}/segment[{si}]");
        let mut wires = Vec::new();
        let mut junctions = Vec::new();
        let mut labels = Vec::new();
        let mut pinrefs = Vec::new();
        for child in elements(seg) {
            match child.tag_name().name() {
                "wire" => {
                    ctx.check_attrs(
                        child,
                        &seg_path,
                        &["x1", "y1", "x2", "y2", "width", "layer", "curve", "style", "cap", "extent"],
                    );
                    wires.push(WireSeg {
                        x1: f64_attr(child, "x1", &seg_path)?,
                        y1: f64_attr(child, "y1", &seg_path)?,
                        x2: f64_attr(child, "x2", &seg_path)?,
                        y2: f64_attr(child, "y2", &seg_path)?,
                        width: f64_attr(child, "width", &seg_path)?,
                    });
                }
                "junction" => {
                    ctx.check_attrs(child, &seg_path, &["x", "y"]);
                    junctions.push(Junction {
                        x: f64_attr(child, "x", &seg_path)?,
                        y: f64_attr(child, "y", &seg_path)?,
                    });
                }
                "label" => {
                    ctx.check_attrs(
                        child,
                        &seg_path,
                        &["x", "y", "size", "layer", "rot", "xref", "font", "ratio"],
                    );
                    let (rotation, mirror) = match child.attribute("rot") {
                        Some(r) => parse_rot(r, &seg_path, true, ctx)?,
                        None => (Rotation::R0, false),
                    };
                    labels.push(NetLabel {
                        x: f64_attr(child, "x", &seg_path)?,
                        y: f64_attr(child, "y", &seg_path)?,
                        size: f64_attr(child, "size", &seg_path)?,
                        rotation,
                        mirror,
                    });
                }
                "pinref" => {
                    ctx.check_attrs(child, &seg_path, &["part", "gate", "pin"]);
                    pinrefs.push(PinRef {
                        part: req_attr(child, "part", &seg_path)?.to_string(),
                        gate: req_attr(child, "gate", &seg_path)?.to_string(),
                        pin: req_attr(child, "pin", &seg_path)?.to_string(),
                    });
                }
                other => ctx.unknown_element(&seg_path, other),
            }
        }
        segments.push(Segment { wires, junctions, labels, pinrefs });
    }
    Ok(Net { name, segments })
}

/// Cross-reference validation: every part resolves to a declared
/// library/deviceset/device, every instance names a declared part, every
/// pinref names an existing part/gate/pin, and part names are unique.
fn validate(doc: &SchematicDoc, ctx: &mut Ctx) -> Result<(), ParseError> {
    let spath = "/eagle/drawing/schematic";

    // Library-internal: gates must point at declared symbols.
    for lib in doc.libraries.values() {
        for ds in lib.devicesets.values() {
            for gate in &ds.gates {
                if !lib.symbols.contains_key(&gate.symbol) {
                    return Err(ParseError::DanglingReference {
                        path: format!(
                            "{spath}/libraries/library[{}]/devicesets/deviceset[{}]/gate[{}]",
                            lib.name, ds.name, gate.name
                        ),
                        message: format!("gate references undeclared symbol {:?}", gate.symbol),
                    });
                }
            }
        }
    }

    let mut seen = BTreeSet::new();
    for (i, part) in doc.parts.iter().enumerate() {
        let ppath = format!("{spath}/parts/part[{i}]");
        if !seen.insert(part.name.as_str()) {
            return Err(ParseError::InvalidDocument {
                path: ppath,
                message: format!("duplicate part name {:?}", part.name),
            });
        }
        let lib = doc.libraries.get(&part.library).ok_or_else(|| {
            ParseError::DanglingReference {
                path: ppath.clone(),
                message: format!("part {:?} references unknown library {:?}", part.name, part.library),
            }
        })?;
        let ds = lib.devicesets.get(&part.deviceset).ok_or_else(|| {
            ParseError::DanglingReference {
                path: ppath.clone(),
                message: format!(
                    "part {:?} references unknown deviceset {:?} in library {:?}",
                    part.name, part.deviceset, part.library
                ),
            }
        })?;
        if !ds.devices.contains_key(&part.device) {
            return Err(ParseError::DanglingReference {
                path: ppath,
                message: format!(
                    "part {:?} references unknown device {:?} of deviceset {:?}",
                    part.name, part.device, part.deviceset
                ),
            });
        }
    }

    for (si, sheet) in doc.sheets.iter().enumerate() {
        let sheet_path = format!("{spath}/sheets/sheet[{si}]");
        for (ii, inst) in sheet.instances.iter().enumerate() {
            if doc.part(&inst.part).is_none() {
                return Err(ParseError::DanglingReference {
                    path: format!("{sheet_path}/instances/instance[{ii}]"),
                    message: format!("instance references undeclared part {:?}", inst.part),
                });
            }
        }
        for net in &sheet.nets {
            for (gi, seg) in net.segments.iter().enumerate() {
                if seg.pinrefs.is_empty() && !seg.wires.is_empty() {
                    ctx.diagnostics.push(Diagnostic::warning(
                        format!("{sheet_path}/nets/net[{}]/segment[{gi}]", net.name),
                        "segment has wires but no pin connections",
                    ));
                }
                for (pi, pr) in seg.pinrefs.iter().enumerate() {
                    let pr_path =
                        format!("{sheet_path}/nets/net[{}]/segment[{gi}]/pinref[{pi}]", net.name);
                    let part = doc.part(&pr.part).ok_or_else(|| ParseError::DanglingReference {
                        path: pr_path.clone(),
                        message: format!("pinref names unknown part {:?}", pr.part),
                    })?;
                    let symbol = doc.symbol_for(part, &pr.gate).ok_or_else(|| {
                        ParseError::DanglingReference {
                            path: pr_path.clone(),
                            message: format!(
                                "pinref names unknown gate {:?} of part {:?}",
                                pr.gate, pr.part
                            ),
                        }
                    })?;
                    if !symbol.pins.iter().any(|p| p.name == pr.pin) {
                        return Err(ParseError::DanglingReference {
                            path: pr_path,
                            message: format!(
                                "pinref names unknown pin {:?} on symbol {:?}",
                                pr.pin, symbol.name
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
