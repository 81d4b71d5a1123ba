//! Embedded monospace stroke font.
//!
//! Glyphs are polylines on a 5x8 unit grid: x in 0..=4, baseline at y=0,
//! cap height at y=6, descenders may reach y=-1. One glyph cell advances
//! 6 units, so a text of size `s` mm advances `s` mm per character and is
//! `s` mm tall.

/// One stroke: a polyline of grid points.
pub type Stroke = &'static [(i8, i8)];

/// Cap height in grid units; a text's `size` maps to this height.
pub const GRID_HEIGHT: f64 = 6.0;
/// Horizontal advance per character in grid units.
pub const ADVANCE_UNITS: f64 = 6.0;
/// Glyph ink width in grid units (excludes inter-character gap).
pub const INK_UNITS: f64 = 4.0;
/// Stroke width as a fraction of the text size.
pub const STROKE_RATIO: f64 = 0.08;

/// Millimeters advanced per character for a text of the given size.
pub fn advance_mm(size: f64) -> f64 {
    size * ADVANCE_UNITS / GRID_HEIGHT
}

/// Tight layout box of a string in mm, anchored at the baseline-left
/// origin: width covers the last glyph's ink, height is the cap height.
pub fn layout_box_mm(text: &str, size: f64) -> (f64, f64) {
    let n = text.chars().count() as f64;
    if n == 0.0 {
        return (0.0, 0.0);
    }
    let unit = size / GRID_HEIGHT;
    (((n - 1.0) * ADVANCE_UNITS + INK_UNITS) * unit, size)
}

/// Strokes for a character. Lowercase letters reuse the uppercase forms;
/// anything without a glyph renders as a box.
pub fn strokes(c: char) -> &'static [Stroke] {
    let c = if c.is_ascii_lowercase() { c.to_ascii_uppercase() } else { c };
    match c {
        ' ' => &[],
        '0' => &[&[(0, 1), (0, 5), (1, 6), (3, 6), (4, 5), (4, 1), (3, 0), (1, 0), (0, 1)], &[(0, 1), (4, 5)]],
        '1' => &[&[(1, 5), (2, 6), (2, 0)], &[(1, 0), (3, 0)]],
        '2' => &[&[(0, 5), (1, 6), (3, 6), (4, 5), (4, 4), (0, 1), (0, 0), (4, 0)]],
        '3' => &[&[(0, 6), (4, 6), (2, 4), (3, 4), (4, 3), (4, 1), (3, 0), (1, 0), (0, 1)]],
        '4' => &[&[(3, 6), (0, 2), (4, 2)], &[(3, 6), (3, 0)]],
        '5' => &[&[(4, 6), (0, 6), (0, 4), (3, 4), (4, 3), (4, 1), (3, 0), (1, 0), (0, 1)]],
        '6' => &[&[(4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0), (3, 0), (4, 1), (4, 2), (3, 3), (0, 3)]],
        '7' => &[&[(0, 6), (4, 6), (1, 0)]],
        '8' => &[
            &[(1, 6), (3, 6), (4, 5), (4, 4), (3, 3), (1, 3), (0, 4), (0, 5), (1, 6)],
            &[(1, 3), (0, 2), (0, 1), (1, 0), (3, 0), (4, 1), (4, 2), (3, 3)],
        ],
        '9' => &[&[(0, 1), (1, 0), (3, 0), (4, 1), (4, 5), (3, 6), (1, 6), (0, 5), (0, 4), (1, 3), (4, 3)]],
        'A' => &[&[(0, 0), (0, 4), (2, 6), (4, 4), (4, 0)], &[(0, 2), (4, 2)]],
        'B' => &[
            &[(0, 0), (0, 6), (3, 6), (4, 5), (4, 4), (3, 3), (0, 3)],
            &[(3, 3), (4, 2), (4, 1), (3, 0), (0, 0)],
        ],
        'C' => &[&[(4, 1), (3, 0), (1, 0), (0, 1), (0, 5), (1, 6), (3, 6), (4, 5)]],
        'D' => &[&[(0, 0), (0, 6), (2, 6), (4, 4), (4, 2), (2, 0), (0, 0)]],
        'E' => &[&[(4, 0), (0, 0), (0, 6), (4, 6)], &[(0, 3), (3, 3)]],
        'F' => &[&[(0, 0), (0, 6), (4, 6)], &[(0, 3), (3, 3)]],
        'G' => &[&[(4, 5), (3, 6), (1, 6), (0, 5), (0, 1), (1, 0), (3, 0), (4, 1), (4, 3), (2, 3)]],
        'H' => &[&[(0, 0), (0, 6)], &[(4, 0), (4, 6)], &[(0, 3), (4, 3)]],
        'I' => &[&[(1, 0), (3, 0)], &[(1, 6), (3, 6)], &[(2, 0), (2, 6)]],
        'J' => &[&[(3, 6), (3, 1), (2, 0), (1, 0), (0, 1)]],
        'K' => &[&[(0, 0), (0, 6)], &[(4, 6), (0, 3), (4, 0)]],
        'L' => &[&[(0, 6), (0, 0), (4, 0)]],
        'M' => &[&[(0, 0), (0, 6), (2, 3), (4, 6), (4, 0)]],
        'N' => &[&[(0, 0), (0, 6), (4, 0), (4, 6)]],
        'O' => &[&[(1, 0), (0, 1), (0, 5), (1, 6), (3, 6), (4, 5), (4, 1), (3, 0), (1, 0)]],
        'P' => &[&[(0, 0), (0, 6), (3, 6), (4, 5), (4, 4), (3, 3), (0, 3)]],
        'Q' => &[
            &[(1, 0), (0, 1), (0, 5), (1, 6), (3, 6), (4, 5), (4, 1), (3, 0), (1, 0)],
            &[(2, 2), (4, 0)],
        ],
        'R' => &[&[(0, 0), (0, 6), (3, 6), (4, 5), (4, 4), (3, 3), (0, 3)], &[(2, 3), (4, 0)]],
        'S' => &[&[(0, 1), (1, 0), (3, 0), (4, 1), (4, 2), (3, 3), (1, 3), (0, 4), (0, 5), (1, 6), (3, 6), (4, 5)]],
        'T' => &[&[(0, 6), (4, 6)], &[(2, 6), (2, 0)]],
        'U' => &[&[(0, 6), (0, 1), (1, 0), (3, 0), (4, 1), (4, 6)]],
        'V' => &[&[(0, 6), (2, 0), (4, 6)]],
        'W' => &[&[(0, 6), (1, 0), (2, 3), (3, 0), (4, 6)]],
        'X' => &[&[(0, 0), (4, 6)], &[(0, 6), (4, 0)]],
        'Y' => &[&[(0, 6), (2, 3), (4, 6)], &[(2, 3), (2, 0)]],
        'Z' => &[&[(0, 6), (4, 6), (0, 0), (4, 0)]],
        '-' => &[&[(1, 3), (3, 3)]],
        '+' => &[&[(2, 1), (2, 5)], &[(0, 3), (4, 3)]],
        '.' => &[&[(2, 0), (2, 0)]],
        ',' => &[&[(2, 0), (1, -1)]],
        '/' => &[&[(0, 0), (4, 6)]],
        '\\' => &[&[(0, 6), (4, 0)]],
        '_' => &[&[(0, -1), (4, -1)]],
        '(' => &[&[(3, 6), (2, 5), (2, 1), (3, 0)]],
        ')' => &[&[(1, 6), (2, 5), (2, 1), (1, 0)]],
        '[' => &[&[(3, 6), (2, 6), (2, 0), (3, 0)]],
        ']' => &[&[(1, 6), (2, 6), (2, 0), (1, 0)]],
        '{' => &[&[(3, 6), (2, 5), (2, 4), (1, 3), (2, 2), (2, 1), (3, 0)]],
        '}' => &[&[(1, 6), (2, 5), (2, 4), (3, 3), (2, 2), (2, 1), (1, 0)]],
        ':' => &[&[(2, 1), (2, 2)], &[(2, 4), (2, 5)]],
        ';' => &[&[(2, 4), (2, 5)], &[(2, 1), (1, 0)]],
        '=' => &[&[(0, 2), (4, 2)], &[(0, 4), (4, 4)]],
        '<' => &[&[(3, 5), (1, 3), (3, 1)]],
        '>' => &[&[(1, 5), (3, 3), (1, 1)]],
        '*' => &[&[(2, 1), (2, 5)], &[(0, 2), (4, 4)], &[(0, 4), (4, 2)]],
        '%' => &[&[(0, 0), (4, 6)], &[(0, 5), (1, 5), (1, 6), (0, 6), (0, 5)], &[(3, 1), (4, 1), (4, 0), (3, 0), (3, 1)]],
        '#' => &[&[(1, 0), (1, 6)], &[(3, 0), (3, 6)], &[(0, 2), (4, 2)], &[(0, 4), (4, 4)]],
        '&' => &[&[(4, 0), (0, 4), (0, 5), (1, 6), (2, 6), (3, 5), (3, 4), (0, 2), (0, 1), (1, 0), (2, 0), (4, 2)]],
        '$' => &[
            &[(0, 1), (1, 0), (3, 0), (4, 1), (4, 2), (3, 3), (1, 3), (0, 4), (0, 5), (1, 6), (3, 6), (4, 5)],
            &[(2, 6), (2, 0)],
        ],
        '!' => &[&[(2, 6), (2, 2)], &[(2, 0), (2, 0)]],
        '?' => &[&[(0, 5), (1, 6), (3, 6), (4, 5), (4, 4), (2, 3), (2, 2)], &[(2, 0), (2, 0)]],
        '\'' => &[&[(2, 6), (2, 5)]],
        '"' => &[&[(1, 6), (1, 5)], &[(3, 6), (3, 5)]],
        '@' => &[&[(4, 0), (1, 0), (0, 1), (0, 5), (1, 6), (3, 6), (4, 5), (4, 2), (2, 2), (2, 4), (4, 4)]],
        '|' => &[&[(2, 0), (2, 6)]],
        '^' => &[&[(1, 5), (2, 6), (3, 5)]],
        '~' => &[&[(0, 3), (1, 4), (3, 2), (4, 3)]],
        '`' => &[&[(2, 6), (3, 5)]],
        _ => &[&[(0, 0), (4, 0), (4, 6), (0, 6), (0, 0)]],
    }
}
