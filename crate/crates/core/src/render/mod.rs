//! Schematic raster rendering with pixel-aligned annotations.
//!
//! The renderer re-draws a parsed schematic from its primitives: symbol
//! graphics, pin stubs, net wires, junctions, and text. Output is
//! deterministic — identical (document, config) pairs produce byte-identical
//! PNGs and annotation documents. Bounding boxes come from transformed
//! primitive extents, never from pixel scans.

pub mod canvas;
pub mod font;

use crate::diag::Diagnostic;
use crate::eagle::{
    extract_nets, resolve_instances, PinDef, PlacedSymbol, Primitive, ResolveError, SchematicDoc,
    SymbolDef,
};
use crate::geometry::{Extent, Rect, Rotation, Transform};
use canvas::{Canvas, Rgb};
use image::RgbImage;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Padding around the drawing extents, in pixels.
pub const CANVAS_MARGIN_PX: i64 = 16;
/// Pin stubs are one-dimensional; their boxes are dilated by this margin
/// on every side so IoU against them is meaningful.
pub const PIN_BBOX_MARGIN_PX: i64 = 3;
/// Text size used for pin and pad name labels, in mm.
pub const PIN_TEXT_SIZE_MM: f64 = 1.778;
/// Junction dot radius in mm.
pub const JUNCTION_RADIUS_MM: f64 = 0.508;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variation {
    /// As exported by the source tool; renders everything, like `FullText`.
    Original,
    FullText,
    NoText,
    /// Drops symbol name and value labels, keeps net labels and pin text.
    NoNameValue,
}

impl Variation {
    pub fn keeps(self, role: TextRole) -> bool {
        match self {
            Variation::Original | Variation::FullText => true,
            Variation::NoText => false,
            Variation::NoNameValue => {
                !matches!(role, TextRole::SymbolName | TextRole::SymbolValue)
            }
        }
    }

    pub const ALL: [Variation; 4] =
        [Variation::Original, Variation::FullText, Variation::NoText, Variation::NoNameValue];
}

impl std::str::FromStr for Variation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Variation::Original),
            "full_text" | "full-text" => Ok(Variation::FullText),
            "no_text" | "no-text" => Ok(Variation::NoText),
            "no_name_value" | "no-name-value" => Ok(Variation::NoNameValue),
            other => Err(format!("unknown variation {other:?}")),
        }
    }
}

impl std::fmt::Display for Variation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variation::Original => "original",
            Variation::FullText => "full_text",
            Variation::NoText => "no_text",
            Variation::NoNameValue => "no_name_value",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Palette {
    EagleDefault,
    Monochrome,
    Custom(BTreeMap<u16, Rgb>),
}

impl Palette {
    pub fn color(&self, layer: u16) -> Rgb {
        match self {
            Palette::Monochrome => [0, 0, 0],
            Palette::Custom(map) => map.get(&layer).copied().unwrap_or([0, 0, 0]),
            Palette::EagleDefault => match layer {
                91 => [0, 128, 0],    // nets
                92 => [0, 0, 255],    // busses
                93 => [0, 100, 0],    // pins
                94 => [128, 0, 0],    // symbols
                95 => [105, 105, 105], // names
                96 => [105, 105, 105], // values
                97 => [105, 105, 105], // info
                98 => [192, 192, 192], // guide
                _ => [0, 0, 0],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    /// Pixels per millimeter.
    pub scale: f64,
    pub variation: Variation,
    pub palette: Palette,
    pub background: Rgb,
    /// Integer downsampling factor applied after rendering.
    pub downsample: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            scale: 10.0,
            variation: Variation::FullText,
            palette: Palette::EagleDefault,
            background: [255, 255, 255],
            downsample: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("drawing is empty: no placed instances and no wires")]
    EmptyDrawing,
    #[error("invalid render config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextRole {
    SymbolName,
    SymbolValue,
    NetLabel,
    PinAnnotation,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TextTarget {
    Symbol { id: u32 },
    Pin { id: u32 },
    Net { name: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolAnnotation {
    pub id: u32,
    pub bbox: Rect,
    #[serde(rename = "type")]
    pub symbol_type: String,
    pub orientation: Rotation,
    pub mirror: bool,
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinAnnotation {
    pub id: u32,
    pub parent: u32,
    pub bbox: Rect,
    pub pin_name: String,
    pub pad_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextAnnotation {
    pub id: u32,
    pub content: String,
    pub bbox: Rect,
    pub role: TextRole,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<TextTarget>,
}

/// Pixel-space annotations aligned to one rendered raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub image_dims: (u32, u32),
    pub symbols: Vec<SymbolAnnotation>,
    pub pins: Vec<PinAnnotation>,
    pub texts: Vec<TextAnnotation>,
    /// Net name -> wire polylines in pixel coordinates.
    pub nets: BTreeMap<String, Vec<Vec<(i64, i64)>>>,
}

impl AnnotationSet {
    pub fn empty(image_dims: (u32, u32)) -> Self {
        AnnotationSet {
            image_dims,
            symbols: Vec::new(),
            pins: Vec::new(),
            texts: Vec::new(),
            nets: BTreeMap::new(),
        }
    }
}

/// Keep everything but the texts a variation hides. `Original` and
/// `FullText` are the identity; `NoText` drops all text instances;
/// `NoNameValue` drops only symbol name and value labels.
pub fn apply_variation(annotations: &AnnotationSet, variation: Variation) -> AnnotationSet {
    let mut out = annotations.clone();
    out.texts.retain(|t| variation.keeps(t.role));
    out
}

// ---------------------------------------------------------------------------
// Display list

#[derive(Debug, Clone)]
enum Shape {
    Segment { x1: f64, y1: f64, x2: f64, y2: f64, width: f64, layer: u16 },
    FilledRect { x0: f64, y0: f64, x1: f64, y1: f64, layer: u16 },
    Ring { cx: f64, cy: f64, radius: f64, width: f64, layer: u16 },
    Disc { cx: f64, cy: f64, radius: f64, layer: u16 },
}

#[derive(Debug, Clone)]
struct TextItem {
    content: String,
    /// Baseline-left anchor in world pixels (y-up).
    anchor: (f64, f64),
    size_px: f64,
    rotation: Rotation,
    mirror: bool,
    role: TextRole,
    target: Option<TextTarget>,
    layer: u16,
}

impl TextItem {
    /// Corners of the layout box after rotation/mirror, world pixels.
    fn corners(&self) -> [(f64, f64); 4] {
        let (w, h) = font::layout_box_mm(&self.content, self.size_px);
        let t = Transform::new(self.anchor.0, self.anchor.1, self.rotation, self.mirror);
        [t.apply(0.0, 0.0), t.apply(w, 0.0), t.apply(w, h), t.apply(0.0, h)]
    }

    fn extent(&self) -> Extent {
        let mut e = Extent::empty();
        for (x, y) in self.corners() {
            e.add_point(x, y);
        }
        e
    }

    /// Stroke segments in world pixels.
    fn segments(&self) -> Vec<(f64, f64, f64, f64)> {
        let unit = self.size_px / font::GRID_HEIGHT;
        let t = Transform::new(self.anchor.0, self.anchor.1, self.rotation, self.mirror);
        let mut out = Vec::new();
        for (i, ch) in self.content.chars().enumerate() {
            let ox = i as f64 * font::ADVANCE_UNITS * unit;
            for stroke in font::strokes(ch) {
                for pair in stroke.windows(2) {
                    let (ax, ay) = (ox + pair[0].0 as f64 * unit, pair[0].1 as f64 * unit);
                    let (bx, by) = (ox + pair[1].0 as f64 * unit, pair[1].1 as f64 * unit);
                    let (ax, ay) = t.apply(ax, ay);
                    let (bx, by) = t.apply(bx, by);
                    out.push((ax, ay, bx, by));
                }
                if stroke.len() == 1 {
                    let (ax, ay) =
                        t.apply(ox + stroke[0].0 as f64 * unit, stroke[0].1 as f64 * unit);
                    out.push((ax, ay, ax, ay));
                }
            }
        }
        out
    }

    fn stroke_width(&self) -> f64 {
        (self.size_px * font::STROKE_RATIO).max(1.0)
    }
}

struct SymRecord {
    name: String,
    value: String,
    symbol_type: String,
    orientation: Rotation,
    mirror: bool,
    extent: Extent,
}

struct PinRecord {
    parent: u32,
    pin_name: String,
    pad_name: String,
    /// Stub segment from anchor to body end, world pixels.
    stub: ((f64, f64), (f64, f64)),
}

struct Layout {
    shapes: Vec<Shape>,
    texts: Vec<TextItem>,
    symbols: Vec<SymRecord>,
    pins: Vec<PinRecord>,
    net_lines: BTreeMap<String, Vec<((f64, f64), (f64, f64))>>,
    extent: Extent,
}

/// Axis-aligned bounding box of a placed symbol in world pixels (before
/// the canvas offset): the union of its transformed graphic primitives and
/// pin stubs, excluding the name/value placeholder texts.
pub fn compute_bbox(placed: &PlacedSymbol, symbol: &SymbolDef, scale: f64) -> Rect {
    symbol_extent(placed, symbol, scale).to_rect()
}

fn is_name_placeholder(content: &str) -> bool {
    content.trim().eq_ignore_ascii_case(">NAME")
}

fn is_value_placeholder(content: &str) -> bool {
    content.trim().eq_ignore_ascii_case(">VALUE")
}

fn symbol_extent(placed: &PlacedSymbol, symbol: &SymbolDef, scale: f64) -> Extent {
    let mut e = Extent::empty();
    let t = &placed.transform;
    let mut add = |x: f64, y: f64| {
        let (wx, wy) = t.apply(x, y);
        e.add_point(wx * scale, wy * scale);
    };
    for prim in &symbol.primitives {
        match prim {
            Primitive::Wire { x1, y1, x2, y2, .. } => {
                add(*x1, *y1);
                add(*x2, *y2);
            }
            Primitive::Rect { x1, y1, x2, y2, .. } => {
                add(*x1, *y1);
                add(*x2, *y2);
            }
            Primitive::Circle { x, y, radius, .. } => {
                add(x - radius, y - radius);
                add(x + radius, y + radius);
            }
            Primitive::Arc { x1, y1, x2, y2, curve, .. } => {
                for (px, py) in sample_arc(*x1, *y1, *x2, *y2, *curve) {
                    add(px, py);
                }
            }
            Primitive::Text { x, y, size, rotation, mirror, content, .. } => {
                if is_name_placeholder(content) || is_value_placeholder(content) {
                    continue;
                }
                let (w, h) = font::layout_box_mm(content, *size);
                let local = Transform::new(*x, *y, *rotation, *mirror);
                for (cx, cy) in
                    [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)].map(|(a, b)| local.apply(a, b))
                {
                    add(cx, cy);
                }
            }
        }
    }
    for pin in &symbol.pins {
        let (ex, ey) = pin_stub_end(pin);
        add(pin.x, pin.y);
        add(ex, ey);
    }
    e
}

/// Far end of the pin stub in symbol coordinates.
fn pin_stub_end(pin: &PinDef) -> (f64, f64) {
    let (dx, dy) = pin.rotation.apply(1.0, 0.0);
    (pin.x + pin.length.mm() * dx, pin.y + pin.length.mm() * dy)
}

fn sample_arc(x1: f64, y1: f64, x2: f64, y2: f64, curve_deg: f64) -> Vec<(f64, f64)> {
    let ang = curve_deg.to_radians();
    let dx = x2 - x1;
    let dy = y2 - y1;
    let chord = (dx * dx + dy * dy).sqrt();
    if chord == 0.0 || ang == 0.0 {
        return vec![(x1, y1), (x2, y2)];
    }
    let half = chord / 2.0;
    let mx = (x1 + x2) / 2.0;
    let my = (y1 + y2) / 2.0;
    // Signed distance from chord midpoint to the arc center, along the
    // left-hand normal of the chord direction.
    let d = half / (ang / 2.0).tan();
    let nx = -dy / chord;
    let ny = dx / chord;
    let cx = mx + nx * d;
    let cy = my + ny * d;
    let start = (y1 - cy).atan2(x1 - cx);
    let steps = ((curve_deg.abs() / 5.0).ceil() as usize).max(2);
    let radius = (half * half + d * d).sqrt();
    (0..=steps)
        .map(|i| {
            let a = start + ang * (i as f64) / (steps as f64);
            (cx + radius * a.cos(), cy + radius * a.sin())
        })
        .collect()
}

fn primitive_shapes(prim: &Primitive, t: &Transform, scale: f64, out: &mut Vec<Shape>) {
    match prim {
        Primitive::Wire { x1, y1, x2, y2, width, layer } => {
            let (ax, ay) = t.apply(*x1, *y1);
            let (bx, by) = t.apply(*x2, *y2);
            out.push(Shape::Segment {
                x1: ax * scale,
                y1: ay * scale,
                x2: bx * scale,
                y2: by * scale,
                width: width * scale,
                layer: *layer,
            });
        }
        Primitive::Rect { x1, y1, x2, y2, layer } => {
            let (ax, ay) = t.apply(*x1, *y1);
            let (bx, by) = t.apply(*x2, *y2);
            out.push(Shape::FilledRect {
                x0: ax * scale,
                y0: ay * scale,
                x1: bx * scale,
                y1: by * scale,
                layer: *layer,
            });
        }
        Primitive::Circle { x, y, radius, width, layer } => {
            let (cx, cy) = t.apply(*x, *y);
            if *width == 0.0 {
                out.push(Shape::Disc {
                    cx: cx * scale,
                    cy: cy * scale,
                    radius: radius * scale,
                    layer: *layer,
                });
            } else {
                out.push(Shape::Ring {
                    cx: cx * scale,
                    cy: cy * scale,
                    radius: radius * scale,
                    width: width * scale,
                    layer: *layer,
                });
            }
        }
        Primitive::Arc { x1, y1, x2, y2, curve, width, layer } => {
            let pts = sample_arc(*x1, *y1, *x2, *y2, *curve);
            for pair in pts.windows(2) {
                let (ax, ay) = t.apply(pair[0].0, pair[0].1);
                let (bx, by) = t.apply(pair[1].0, pair[1].1);
                out.push(Shape::Segment {
                    x1: ax * scale,
                    y1: ay * scale,
                    x2: bx * scale,
                    y2: by * scale,
                    width: width * scale,
                    layer: *layer,
                });
            }
        }
        Primitive::Text { .. } => unreachable!("texts are collected separately"),
    }
}

fn build_layout(doc: &SchematicDoc, scale: f64) -> Result<Layout, RenderError> {
    if doc.is_empty_drawing() {
        return Err(RenderError::EmptyDrawing);
    }
    let mut placed = resolve_instances(doc)?;
    placed.sort_by(|a, b| (&a.part_name, &a.gate).cmp(&(&b.part_name, &b.gate)));
    let nets = extract_nets(doc)?;

    let mut shapes = Vec::new();
    let mut texts = Vec::new();
    let mut symbols = Vec::new();
    let mut pins = Vec::new();

    // Sheet-level plain graphics first, then nets, then symbols on top.
    for sheet in &doc.sheets {
        let ident = Transform::translation(0.0, 0.0);
        for prim in &sheet.plain {
            if let Primitive::Text { x, y, size, layer, rotation, mirror, content } = prim {
                if !content.is_empty() {
                    texts.push(TextItem {
                        content: content.clone(),
                        anchor: (x * scale, y * scale),
                        size_px: size * scale,
                        rotation: *rotation,
                        mirror: *mirror,
                        role: TextRole::Plain,
                        target: None,
                        layer: *layer,
                    });
                }
            } else {
                primitive_shapes(prim, &ident, scale, &mut shapes);
            }
        }
    }

    let mut net_lines: BTreeMap<String, Vec<((f64, f64), (f64, f64))>> = BTreeMap::new();
    for net in &nets {
        let lines = net_lines.entry(net.name.clone()).or_default();
        for seg in &net.segments {
            for wire in &seg.wires {
                let a = (wire.x1 * scale, wire.y1 * scale);
                let b = (wire.x2 * scale, wire.y2 * scale);
                shapes.push(Shape::Segment {
                    x1: a.0,
                    y1: a.1,
                    x2: b.0,
                    y2: b.1,
                    width: wire.width * scale,
                    layer: 91,
                });
                lines.push((a, b));
            }
            for j in &seg.junctions {
                shapes.push(Shape::Disc {
                    cx: j.x * scale,
                    cy: j.y * scale,
                    radius: JUNCTION_RADIUS_MM * scale,
                    layer: 91,
                });
            }
            for label in &seg.labels {
                texts.push(TextItem {
                    content: net.name.clone(),
                    anchor: (label.x * scale, label.y * scale),
                    size_px: label.size * scale,
                    rotation: label.rotation,
                    mirror: label.mirror,
                    role: TextRole::NetLabel,
                    target: Some(TextTarget::Net { name: net.name.clone() }),
                    layer: 95,
                });
            }
        }
    }

    for (sym_idx, p) in placed.iter().enumerate() {
        let part = doc.part(&p.part_name).expect("validated part");
        let symbol = doc.symbol_for(part, &p.gate).expect("validated gate");
        let t = &p.transform;
        for prim in &symbol.primitives {
            if let Primitive::Text { x, y, size, layer, rotation, mirror, content } = prim {
                let (role, target, rendered) = if is_name_placeholder(content) {
                    (
                        TextRole::SymbolName,
                        Some(TextTarget::Symbol { id: sym_idx as u32 }),
                        p.display_name.clone(),
                    )
                } else if is_value_placeholder(content) {
                    (
                        TextRole::SymbolValue,
                        Some(TextTarget::Symbol { id: sym_idx as u32 }),
                        p.value.clone(),
                    )
                } else {
                    (TextRole::Plain, None, content.clone())
                };
                if rendered.is_empty() {
                    continue;
                }
                let (ax, ay) = t.apply(*x, *y);
                texts.push(TextItem {
                    content: rendered,
                    anchor: (ax * scale, ay * scale),
                    size_px: size * scale,
                    rotation: rotation.compose(t.rotation),
                    mirror: *mirror != t.mirror,
                    role,
                    target,
                    layer: *layer,
                });
            } else {
                primitive_shapes(prim, t, scale, &mut shapes);
            }
        }

        let mut sorted_pins: Vec<&PinDef> = symbol.pins.iter().collect();
        sorted_pins.sort_by(|a, b| a.name.cmp(&b.name));
        for pin in sorted_pins {
            let pin_id = pins.len() as u32;
            let (ax, ay) = t.apply(pin.x, pin.y);
            let (ex, ey) = {
                let (sx, sy) = pin_stub_end(pin);
                t.apply(sx, sy)
            };
            let stub = ((ax * scale, ay * scale), (ex * scale, ey * scale));
            shapes.push(Shape::Segment {
                x1: stub.0 .0,
                y1: stub.0 .1,
                x2: stub.1 .0,
                y2: stub.1 .1,
                width: 0.1524 * scale,
                layer: 93,
            });
            let (dirx, diry) = t.apply_vector(pin.rotation.apply(1.0, 0.0).0, pin.rotation.apply(1.0, 0.0).1);
            if pin.visible.shows_pin_name() && !pin.name.is_empty() {
                let anchor = (
                    (ex + 0.5 * dirx) * scale,
                    (ey + 0.5 * diry) * scale,
                );
                texts.push(TextItem {
                    content: pin.name.clone(),
                    anchor,
                    size_px: PIN_TEXT_SIZE_MM * scale,
                    rotation: Rotation::R0,
                    mirror: false,
                    role: TextRole::PinAnnotation,
                    target: Some(TextTarget::Pin { id: pin_id }),
                    layer: 95,
                });
            }
            let pad_name = p.pad_name(&pin.name).to_string();
            if pin.visible.shows_pad_name() && !pad_name.is_empty() {
                let mid = ((ax + ex) / 2.0, (ay + ey) / 2.0);
                // Perpendicular offset keeps the pad label off the stub.
                let anchor = ((mid.0 - 0.5 * diry) * scale, (mid.1 + 0.5 * dirx + 0.3) * scale);
                texts.push(TextItem {
                    content: pad_name.clone(),
                    anchor,
                    size_px: PIN_TEXT_SIZE_MM * scale,
                    rotation: Rotation::R0,
                    mirror: false,
                    role: TextRole::PinAnnotation,
                    target: Some(TextTarget::Pin { id: pin_id }),
                    layer: 96,
                });
            }
            pins.push(PinRecord {
                parent: sym_idx as u32,
                pin_name: pin.name.clone(),
                pad_name,
                stub,
            });
        }

        symbols.push(SymRecord {
            name: p.display_name.clone(),
            value: p.value.clone(),
            symbol_type: p.symbol_type.clone(),
            orientation: t.rotation,
            mirror: t.mirror,
            extent: symbol_extent(p, symbol, scale),
        });
    }

    // Canvas extents cover every shape and every text layout box regardless
    // of the requested variation, so geometry is identical across
    // variations of the same document.
    let mut extent = Extent::empty();
    for shape in &shapes {
        match shape {
            Shape::Segment { x1, y1, x2, y2, .. } => {
                extent.add_point(*x1, *y1);
                extent.add_point(*x2, *y2);
            }
            Shape::FilledRect { x0, y0, x1, y1, .. } => {
                extent.add_point(*x0, *y0);
                extent.add_point(*x1, *y1);
            }
            Shape::Ring { cx, cy, radius, .. } | Shape::Disc { cx, cy, radius, .. } => {
                extent.add_point(cx - radius, cy - radius);
                extent.add_point(cx + radius, cy + radius);
            }
        }
    }
    for text in &texts {
        extent.add_extent(&text.extent());
    }
    for rec in &symbols {
        extent.add_extent(&rec.extent);
    }
    if extent.is_empty() {
        return Err(RenderError::EmptyDrawing);
    }

    Ok(Layout { shapes, texts, symbols, pins, net_lines, extent })
}

/// World-pixel (y-up) to image-pixel (y-down) mapping.
struct Mapper {
    min_x: f64,
    max_y: f64,
}

impl Mapper {
    fn point(&self, x: f64, y: f64) -> (f64, f64) {
        (
            x - self.min_x + CANVAS_MARGIN_PX as f64,
            self.max_y - y + CANVAS_MARGIN_PX as f64,
        )
    }

    fn rect(&self, e: &Extent) -> Rect {
        let (x0, y1) = self.point(e.min_x, e.min_y);
        let (x1, y0) = self.point(e.max_x, e.max_y);
        Extent { min_x: x0, min_y: y0, max_x: x1, max_y: y1 }.to_rect()
    }
}

/// Render a schematic into a raster plus pixel-aligned annotations.
pub fn render(
    doc: &SchematicDoc,
    cfg: &RenderConfig,
) -> Result<(RgbImage, AnnotationSet), RenderError> {
    if !(cfg.scale > 0.0) {
        return Err(RenderError::InvalidConfig(format!("scale must be > 0, got {}", cfg.scale)));
    }
    if cfg.downsample < 1 {
        return Err(RenderError::InvalidConfig("downsample factor must be >= 1".into()));
    }

    let layout = build_layout(doc, cfg.scale)?;
    let ext = &layout.extent;
    let width = ((ext.max_x - ext.min_x).ceil() as i64 + 2 * CANVAS_MARGIN_PX) as u32;
    let height = ((ext.max_y - ext.min_y).ceil() as i64 + 2 * CANVAS_MARGIN_PX) as u32;
    let map = Mapper { min_x: ext.min_x, max_y: ext.max_y };

    let mut canvas = Canvas::new(width, height, cfg.background);
    for shape in &layout.shapes {
        match shape {
            Shape::Segment { x1, y1, x2, y2, width, layer } => {
                let (ax, ay) = map.point(*x1, *y1);
                let (bx, by) = map.point(*x2, *y2);
                canvas.segment(ax, ay, bx, by, *width, cfg.palette.color(*layer));
            }
            Shape::FilledRect { x0, y0, x1, y1, layer } => {
                let (ax, ay) = map.point(*x0, *y0);
                let (bx, by) = map.point(*x1, *y1);
                canvas.fill_rect(ax, ay, bx, by, cfg.palette.color(*layer));
            }
            Shape::Ring { cx, cy, radius, width, layer } => {
                let (mx, my) = map.point(*cx, *cy);
                canvas.ring(mx, my, *radius, *width, cfg.palette.color(*layer));
            }
            Shape::Disc { cx, cy, radius, layer } => {
                let (mx, my) = map.point(*cx, *cy);
                canvas.disc(mx, my, *radius, cfg.palette.color(*layer));
            }
        }
    }
    for text in &layout.texts {
        if !cfg.variation.keeps(text.role) {
            continue;
        }
        let color = cfg.palette.color(text.layer);
        let w = text.stroke_width();
        for (x1, y1, x2, y2) in text.segments() {
            let (ax, ay) = map.point(x1, y1);
            let (bx, by) = map.point(x2, y2);
            canvas.segment(ax, ay, bx, by, w, color);
        }
    }

    let dims = (width, height);
    let bound = |r: Rect| r.clamp_to(width as i64, height as i64);

    let symbols = layout
        .symbols
        .iter()
        .enumerate()
        .map(|(i, rec)| SymbolAnnotation {
            id: i as u32,
            bbox: bound(map.rect(&rec.extent)),
            symbol_type: rec.symbol_type.clone(),
            orientation: rec.orientation,
            mirror: rec.mirror,
            name: rec.name.clone(),
            value: rec.value.clone(),
        })
        .collect();

    let pins = layout
        .pins
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut e = Extent::empty();
            e.add_point(rec.stub.0 .0, rec.stub.0 .1);
            e.add_point(rec.stub.1 .0, rec.stub.1 .1);
            PinAnnotation {
                id: i as u32,
                parent: rec.parent,
                bbox: bound(map.rect(&e).dilate(PIN_BBOX_MARGIN_PX)),
                pin_name: rec.pin_name.clone(),
                pad_name: rec.pad_name.clone(),
            }
        })
        .collect();

    let texts = layout
        .texts
        .iter()
        .enumerate()
        .map(|(i, t)| TextAnnotation {
            id: i as u32,
            content: t.content.clone(),
            bbox: bound(map.rect(&t.extent())),
            role: t.role,
            target: t.target.clone(),
        })
        .collect();

    let nets = layout
        .net_lines
        .iter()
        .map(|(name, lines)| {
            let polylines = lines
                .iter()
                .map(|(a, b)| {
                    let (ax, ay) = map.point(a.0, a.1);
                    let (bx, by) = map.point(b.0, b.1);
                    vec![
                        (ax.round() as i64, ay.round() as i64),
                        (bx.round() as i64, by.round() as i64),
                    ]
                })
                .collect();
            (name.clone(), polylines)
        })
        .collect();

    let mut annotations =
        apply_variation(&AnnotationSet { image_dims: dims, symbols, pins, texts, nets }, cfg.variation);

    let mut img = canvas.into_image();
    if cfg.downsample > 1 {
        img = canvas::downsample(&img, cfg.downsample);
        annotations = downscale_annotations(&annotations, cfg.downsample);
    }
    Ok((img, annotations))
}

fn downscale_annotations(set: &AnnotationSet, factor: u32) -> AnnotationSet {
    let f = factor as i64;
    let dims = (set.image_dims.0.div_ceil(factor), set.image_dims.1.div_ceil(factor));
    let scale_rect = |r: &Rect| r.downscale(f).clamp_to(dims.0 as i64, dims.1 as i64);
    AnnotationSet {
        image_dims: dims,
        symbols: set
            .symbols
            .iter()
            .map(|s| SymbolAnnotation { bbox: scale_rect(&s.bbox), ..s.clone() })
            .collect(),
        pins: set
            .pins
            .iter()
            .map(|p| PinAnnotation { bbox: scale_rect(&p.bbox), ..p.clone() })
            .collect(),
        texts: set
            .texts
            .iter()
            .map(|t| TextAnnotation { bbox: scale_rect(&t.bbox), ..t.clone() })
            .collect(),
        nets: set
            .nets
            .iter()
            .map(|(name, polylines)| {
                let scaled = polylines
                    .iter()
                    .map(|poly| {
                        poly.iter()
                            .map(|(x, y)| {
                                (
                                    (*x as f64 / f as f64).round() as i64,
                                    (*y as f64 / f as f64).round() as i64,
                                )
                            })
                            .collect()
                    })
                    .collect();
                (name.clone(), scaled)
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Annotation document I/O

pub const ANNOTATION_SCHEMA: &str = "sch2net/annotations/v1";

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("annotation {what} has bbox outside image {dims:?}")]
    OutOfBounds { what: String, dims: (u32, u32) },
    #[error("annotation document violates schema: {0}")]
    Schema(String),
}

#[derive(Serialize, Deserialize)]
struct AnnotationDoc {
    schema: String,
    #[serde(flatten)]
    set: AnnotationSet,
}

/// Serialize with deterministic ordering. Refuses sets whose boxes lie
/// outside the image, reporting which annotation is at fault.
pub fn export_annotations(set: &AnnotationSet) -> Result<String, AnnotationError> {
    let (w, h) = (set.image_dims.0 as i64, set.image_dims.1 as i64);
    let check = |what: String, r: &Rect| -> Result<(), AnnotationError> {
        if r.x0 < 0 || r.y0 < 0 || r.x1 > w || r.y1 > h || !r.is_ordered() {
            Err(AnnotationError::OutOfBounds { what, dims: set.image_dims })
        } else {
            Ok(())
        }
    };
    for s in &set.symbols {
        check(format!("symbol[{}]", s.id), &s.bbox)?;
    }
    for p in &set.pins {
        check(format!("pin[{}]", p.id), &p.bbox)?;
    }
    for t in &set.texts {
        check(format!("text[{}]", t.id), &t.bbox)?;
    }
    let doc = AnnotationDoc { schema: ANNOTATION_SCHEMA.to_string(), set: set.clone() };
    let mut out = serde_json::to_string_pretty(&doc).expect("annotation serialization");
    out.push('\n');
    Ok(out)
}

pub fn load_annotations(text: &str) -> Result<AnnotationSet, AnnotationError> {
    let doc: AnnotationDoc =
        serde_json::from_str(text).map_err(|e| AnnotationError::Schema(e.to_string()))?;
    if doc.schema != ANNOTATION_SCHEMA {
        return Err(AnnotationError::Schema(format!(
            "unknown schema {:?}, expected {ANNOTATION_SCHEMA:?}",
            doc.schema
        )));
    }
    Ok(doc.set)
}

/// Diagnostics emitted while re-checking an annotation set against its
/// image bounds; used by batch pipelines that keep going on bad files.
pub fn validate_annotations(set: &AnnotationSet) -> Vec<Diagnostic> {
    match export_annotations(set) {
        Ok(_) => Vec::new(),
        Err(e) => vec![Diagnostic::error("annotations", e.to_string())],
    }
}
