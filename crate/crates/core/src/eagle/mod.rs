//! EAGLE schematic ingestion: XML parsing, instance resolution, and net
//! extraction.

pub mod model;
pub mod parse;
pub mod resolve;

pub use model::{
    Connect, Device, DeviceSet, Gate, Instance, Junction, Library, Net, NetLabel, Part, PinDef,
    PinLength, PinRef, PinVisible, Primitive, SchematicDoc, Segment, Sheet, SymbolDef, WireSeg,
};
pub use parse::{parse_schematic, ParseError, ParsedSchematic};
pub use resolve::{extract_nets, resolve_instances, NetDef, PlacedSymbol, ResolveError};

#[cfg(test)]
pub(crate) mod fixtures {
    /// Minimal two-resistor fixture: 1 library, 1 deviceset, 2 parts,
    /// 1 net with 2 pinrefs.
    pub fn rc_minimal() -> String {
        wrap(r#"
  <libraries>
    <library name="passive">
      <symbols>
        <symbol name="R-US">
          <rectangle x1="-2.54" y1="-0.889" x2="2.54" y2="0.889" layer="94"/>
          <text x="-3.81" y="1.905" size="1.778" layer="95">&gt;NAME</text>
          <text x="-3.81" y="-3.683" size="1.778" layer="96">&gt;VALUE</text>
          <pin name="1" x="-5.08" y="0" visible="off" length="short" direction="pas" swaplevel="1"/>
          <pin name="2" x="5.08" y="0" visible="off" length="short" direction="pas" swaplevel="1" rot="R180"/>
        </symbol>
      </symbols>
      <devicesets>
        <deviceset name="R-US_" prefix="R" uservalue="yes">
          <gates>
            <gate name="G$1" symbol="R-US" x="0" y="0"/>
          </gates>
          <devices>
            <device name="R0402" package="R0402">
              <connects>
                <connect gate="G$1" pin="1" pad="1"/>
                <connect gate="G$1" pin="2" pad="2"/>
              </connects>
            </device>
          </devices>
        </deviceset>
      </devicesets>
    </library>
  </libraries>
  <parts>
    <part name="R1" library="passive" deviceset="R-US_" device="R0402" value="10k"/>
    <part name="R2" library="passive" deviceset="R-US_" device="R0402" value="4k7"/>
  </parts>
  <sheets>
    <sheet>
      <plain/>
      <instances>
        <instance part="R1" gate="G$1" x="25.4" y="25.4"/>
        <instance part="R2" gate="G$1" x="40.64" y="25.4" rot="R90"/>
      </instances>
      <nets>
        <net name="N$1" class="0">
          <segment>
            <wire x1="30.48" y1="25.4" x2="40.64" y2="25.4" width="0.1524" layer="91"/>
            <wire x1="40.64" y1="25.4" x2="40.64" y2="20.32" width="0.1524" layer="91"/>
            <pinref part="R1" gate="G$1" pin="2"/>
            <pinref part="R2" gate="G$1" pin="1"/>
          </segment>
        </net>
      </nets>
    </sheet>
  </sheets>
"#)
    }

    /// Dual op-amp part placed twice, plus a part that is never instanced.
    pub fn opamp_two_gates() -> String {
        wrap(r#"
  <libraries>
    <library name="ic">
      <symbols>
        <symbol name="OPAMP">
          <wire x1="-5.08" y1="5.08" x2="-5.08" y2="-5.08" width="0.254" layer="94"/>
          <wire x1="-5.08" y1="-5.08" x2="5.08" y2="0" width="0.254" layer="94"/>
          <wire x1="5.08" y1="0" x2="-5.08" y2="5.08" width="0.254" layer="94"/>
          <text x="-5.08" y="6.35" size="1.778" layer="95">&gt;NAME</text>
          <pin name="+IN" x="-10.16" y="2.54" visible="pin" length="middle" direction="in"/>
          <pin name="-IN" x="-10.16" y="-2.54" visible="pin" length="middle" direction="in"/>
          <pin name="OUT" x="10.16" y="0" visible="pin" length="middle" direction="out" rot="R180"/>
        </symbol>
      </symbols>
      <devicesets>
        <deviceset name="OPAMP-DUAL" prefix="U">
          <gates>
            <gate name="A" symbol="OPAMP" x="0" y="0"/>
            <gate name="B" symbol="OPAMP" x="0" y="-20.32"/>
          </gates>
          <devices>
            <device name="" package="SO08">
              <connects>
                <connect gate="A" pin="+IN" pad="3"/>
                <connect gate="A" pin="-IN" pad="2"/>
                <connect gate="A" pin="OUT" pad="1"/>
                <connect gate="B" pin="+IN" pad="5"/>
                <connect gate="B" pin="-IN" pad="6"/>
                <connect gate="B" pin="OUT" pad="7"/>
              </connects>
            </device>
          </devices>
        </deviceset>
      </devicesets>
    </library>
    <library name="passive">
      <symbols>
        <symbol name="R-US">
          <rectangle x1="-2.54" y1="-0.889" x2="2.54" y2="0.889" layer="94"/>
          <pin name="1" x="-5.08" y="0" visible="off" length="short" direction="pas"/>
          <pin name="2" x="5.08" y="0" visible="off" length="short" direction="pas" rot="R180"/>
        </symbol>
      </symbols>
      <devicesets>
        <deviceset name="R-US_" prefix="R" uservalue="yes">
          <gates>
            <gate name="G$1" symbol="R-US" x="0" y="0"/>
          </gates>
          <devices>
            <device name="R0402">
              <connects>
                <connect gate="G$1" pin="1" pad="1"/>
                <connect gate="G$1" pin="2" pad="2"/>
              </connects>
            </device>
          </devices>
        </deviceset>
      </devicesets>
    </library>
  </libraries>
  <parts>
    <part name="U1" library="ic" deviceset="OPAMP-DUAL" device=""/>
    <part name="R9" library="passive" deviceset="R-US_" device="R0402" value="1k"/>
  </parts>
  <sheets>
    <sheet>
      <instances>
        <instance part="U1" gate="A" x="30.48" y="50.8"/>
        <instance part="U1" gate="B" x="30.48" y="20.32" rot="MR90"/>
      </instances>
      <nets>
        <net name="FB">
          <segment>
            <wire x1="40.64" y1="50.8" x2="45.72" y2="50.8" width="0.1524" layer="91"/>
            <pinref part="U1" gate="A" pin="OUT"/>
            <pinref part="U1" gate="B" pin="+IN"/>
          </segment>
        </net>
      </nets>
    </sheet>
  </sheets>
"#)
    }

    /// GND spans two segments with three pinrefs total; VCC is separate.
    pub fn gnd_two_segments() -> String {
        wrap(r#"
  <libraries>
    <library name="passive">
      <symbols>
        <symbol name="C-EU">
          <rectangle x1="-1.905" y1="0.508" x2="1.905" y2="1.143" layer="94"/>
          <rectangle x1="-1.905" y1="-1.143" x2="1.905" y2="-0.508" layer="94"/>
          <text x="-2.54" y="2.54" size="1.778" layer="95">&gt;NAME</text>
          <text x="-2.54" y="-4.318" size="1.778" layer="96">&gt;VALUE</text>
          <pin name="1" x="0" y="5.08" visible="off" length="short" direction="pas" rot="R270"/>
          <pin name="2" x="0" y="-5.08" visible="off" length="short" direction="pas" rot="R90"/>
        </symbol>
      </symbols>
      <devicesets>
        <deviceset name="C-EU_" prefix="C" uservalue="yes">
          <gates>
            <gate name="G$1" symbol="C-EU" x="0" y="0"/>
          </gates>
          <devices>
            <device name="C0402">
              <connects>
                <connect gate="G$1" pin="1" pad="1"/>
                <connect gate="G$1" pin="2" pad="2"/>
              </connects>
            </device>
          </devices>
        </deviceset>
      </devicesets>
    </library>
  </libraries>
  <parts>
    <part name="C1" library="passive" deviceset="C-EU_" device="C0402" value="100n"/>
    <part name="C2" library="passive" deviceset="C-EU_" device="C0402" value="1u"/>
    <part name="C3" library="passive" deviceset="C-EU_" device="C0402" value="10u"/>
  </parts>
  <sheets>
    <sheet>
      <instances>
        <instance part="C1" gate="G$1" x="25.4" y="25.4"/>
        <instance part="C2" gate="G$1" x="38.1" y="25.4"/>
        <instance part="C3" gate="G$1" x="50.8" y="25.4"/>
      </instances>
      <nets>
        <net name="GND">
          <segment>
            <wire x1="25.4" y1="20.32" x2="25.4" y2="15.24" width="0.1524" layer="91"/>
            <wire x1="25.4" y1="15.24" x2="38.1" y2="15.24" width="0.1524" layer="91"/>
            <wire x1="38.1" y1="15.24" x2="38.1" y2="20.32" width="0.1524" layer="91"/>
            <junction x="38.1" y="15.24"/>
            <label x="26.67" y="13.97" size="1.778" layer="95"/>
            <pinref part="C1" gate="G$1" pin="2"/>
            <pinref part="C2" gate="G$1" pin="2"/>
          </segment>
          <segment>
            <wire x1="50.8" y1="20.32" x2="50.8" y2="13.97" width="0.1524" layer="91"/>
            <pinref part="C3" gate="G$1" pin="2"/>
          </segment>
        </net>
        <net name="VCC">
          <segment>
            <wire x1="25.4" y1="30.48" x2="25.4" y2="35.56" width="0.1524" layer="91"/>
            <wire x1="25.4" y1="35.56" x2="50.8" y2="35.56" width="0.1524" layer="91"/>
            <wire x1="50.8" y1="35.56" x2="50.8" y2="30.48" width="0.1524" layer="91"/>
            <wire x1="38.1" y1="35.56" x2="38.1" y2="30.48" width="0.1524" layer="91"/>
            <junction x="38.1" y="35.56"/>
            <label x="27.94" y="36.83" size="1.778" layer="95"/>
            <pinref part="C1" gate="G$1" pin="1"/>
            <pinref part="C2" gate="G$1" pin="1"/>
            <pinref part="C3" gate="G$1" pin="1"/>
          </segment>
        </net>
      </nets>
    </sheet>
  </sheets>
"#)
    }

    pub fn empty_sheets() -> String {
        wrap("\n  <libraries/>\n  <parts/>\n  <sheets/>\n")
    }

    pub fn wrap(schematic_body: &str) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n\
             <!DOCTYPE eagle SYSTEM \"eagle.dtd\">\n\
             <eagle version=\"6.5.0\">\n<drawing>\n\
             <settings>\n<setting alwaysvectorfont=\"no\"/>\n</settings>\n\
             <grid distance=\"0.1\" unitdist=\"inch\" unit=\"inch\" style=\"lines\" multiple=\"1\" display=\"no\"/>\n\
             <layers>\n<layer number=\"91\" name=\"Nets\" color=\"2\" fill=\"1\" visible=\"yes\" active=\"yes\"/>\n</layers>\n\
             <schematic xreflabel=\"%F%N/%S.%C%R\" xrefpart=\"/%S.%C%R\">\n{schematic_body}</schematic>\n\
             </drawing>\n</eagle>\n"
        )
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures;
    use super::*;
    use crate::diag::Severity;

    #[test]
    fn parses_minimal_fixture() {
        let parsed = parse_schematic(fixtures::rc_minimal().as_bytes()).unwrap();
        let doc = &parsed.doc;
        assert_eq!(doc.parts.len(), 2);
        assert_eq!(doc.sheets.len(), 1);
        assert_eq!(doc.sheets[0].nets.len(), 1);
        assert_eq!(doc.pinref_count(), 2);
        assert_eq!(doc.grid_mm, 2.54);
        // Independently walk the XML to cross-check the counts.
        let raw = fixtures::rc_minimal();
        let xml = roxmltree::Document::parse(&raw).unwrap();
        let parts = xml.descendants().filter(|n| n.has_tag_name("part")).count();
        let pinrefs = xml.descendants().filter(|n| n.has_tag_name("pinref")).count();
        assert_eq!(doc.parts.len(), parts);
        assert_eq!(doc.pinref_count(), pinrefs);
    }

    #[test]
    fn empty_sheets_parse_to_empty_doc() {
        let parsed = parse_schematic(fixtures::empty_sheets().as_bytes()).unwrap();
        assert_eq!(parsed.doc.parts.len(), 0);
        assert_eq!(parsed.doc.sheets.len(), 0);
    }

    #[test]
    fn truncated_xml_is_malformed() {
        let mut xml = fixtures::rc_minimal();
        xml.truncate(xml.len() - 40);
        let err = parse_schematic(xml.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::MalformedXml(_)), "{err}");
    }

    #[test]
    fn old_version_is_unsupported() {
        let xml = fixtures::rc_minimal().replace("version=\"6.5.0\"", "version=\"5.11\"");
        let err = parse_schematic(xml.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::UnsupportedVersion { .. }), "{err}");
    }

    #[test]
    fn dangling_pinref_is_reported_with_path() {
        let xml = fixtures::rc_minimal().replace(
            "<pinref part=\"R2\" gate=\"G$1\" pin=\"1\"/>",
            "<pinref part=\"R7\" gate=\"G$1\" pin=\"1\"/>",
        );
        match parse_schematic(xml.as_bytes()).unwrap_err() {
            ParseError::DanglingReference { path, message } => {
                assert!(path.contains("net[N$1]"), "{path}");
                assert!(message.contains("R7"), "{message}");
            }
            other => panic!("expected DanglingReference, got {other}"),
        }
    }

    #[test]
    fn duplicate_part_names_rejected() {
        let xml = fixtures::rc_minimal().replace("name=\"R2\"", "name=\"R1\"");
        let err = parse_schematic(xml.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::InvalidDocument { .. }), "{err}");
    }

    #[test]
    fn unknown_elements_warn_but_parse() {
        let xml = fixtures::rc_minimal().replace(
            "<plain/>",
            "<plain><frobnicator x=\"1\"/></plain>",
        );
        let parsed = parse_schematic(xml.as_bytes()).unwrap();
        assert!(parsed
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning && d.message.contains("frobnicator")));
        assert_eq!(parsed.doc.parts.len(), 2);
    }

    #[test]
    fn ir_round_trip_is_fixed_point() {
        let parsed = parse_schematic(fixtures::gnd_two_segments().as_bytes()).unwrap();
        let json = serde_json::to_string(&parsed.doc).unwrap();
        let reloaded: SchematicDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.doc, reloaded);
        let json2 = serde_json::to_string(&reloaded).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn parsing_is_deterministic() {
        let bytes = fixtures::opamp_two_gates();
        let a = parse_schematic(bytes.as_bytes()).unwrap();
        let b = parse_schematic(bytes.as_bytes()).unwrap();
        assert_eq!(a.doc, b.doc);
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    #[test]
    fn resolve_two_gate_part_yields_two_placements() {
        let parsed = parse_schematic(fixtures::opamp_two_gates().as_bytes()).unwrap();
        let placed = resolve_instances(&parsed.doc).unwrap();
        assert_eq!(placed.len(), 2);
        assert!(placed.iter().all(|p| p.part_name == "U1"));
        assert_eq!(placed[0].display_name, "U1A");
        assert_eq!(placed[1].display_name, "U1B");
        // pad_map comes from the device connects of the right gate
        assert_eq!(placed[0].pad_name("OUT"), "1");
        assert_eq!(placed[1].pad_name("OUT"), "7");
        // R9 is declared but never instanced
        assert!(!placed.iter().any(|p| p.part_name == "R9"));
    }

    #[test]
    fn resolve_passes_mirror_and_rotation_through() {
        let parsed = parse_schematic(fixtures::opamp_two_gates().as_bytes()).unwrap();
        let placed = resolve_instances(&parsed.doc).unwrap();
        let b = &placed[1];
        assert!(b.transform.mirror);
        assert_eq!(b.transform.rotation, crate::geometry::Rotation::R90);
    }

    #[test]
    fn resolve_missing_gate_errors() {
        let xml = fixtures::opamp_two_gates().replace(
            "<instance part=\"U1\" gate=\"B\"",
            "<instance part=\"U1\" gate=\"C\"",
        );
        // The gate reference is not validated until resolution.
        let parsed = parse_schematic(xml.as_bytes()).unwrap();
        let err = resolve_instances(&parsed.doc).unwrap_err();
        assert!(matches!(err, ResolveError::MissingGate { .. }), "{err}");
    }

    #[test]
    fn nets_merge_segments_by_name() {
        let parsed = parse_schematic(fixtures::gnd_two_segments().as_bytes()).unwrap();
        let nets = extract_nets(&parsed.doc).unwrap();
        assert_eq!(nets.len(), 2);
        let gnd = nets.iter().find(|n| n.name == "GND").unwrap();
        assert_eq!(gnd.segments.len(), 2);
        assert_eq!(gnd.pinref_count(), 3);
        let vcc = nets.iter().find(|n| n.name == "VCC").unwrap();
        assert_eq!(vcc.pinref_count(), 3);
    }

    #[test]
    fn pinref_counts_are_conserved_by_merging() {
        for xml in [fixtures::rc_minimal(), fixtures::gnd_two_segments(), fixtures::opamp_two_gates()]
        {
            let parsed = parse_schematic(xml.as_bytes()).unwrap();
            let nets = extract_nets(&parsed.doc).unwrap();
            let merged: usize = nets.iter().map(|n| n.pinref_count()).sum();
            assert_eq!(merged, parsed.doc.pinref_count());
        }
    }

    #[test]
    fn wire_only_segment_is_kept_and_flagged() {
        let xml = fixtures::rc_minimal().replace(
            "</nets>",
            "<net name=\"FLOAT\"><segment>\
             <wire x1=\"5\" y1=\"5\" x2=\"10\" y2=\"5\" width=\"0.1524\" layer=\"91\"/>\
             </segment></net></nets>",
        );
        let parsed = parse_schematic(xml.as_bytes()).unwrap();
        assert!(parsed
            .diagnostics
            .iter()
            .any(|d| d.path.contains("FLOAT") && d.message.contains("no pin connections")));
        let nets = extract_nets(&parsed.doc).unwrap();
        let float = nets.iter().find(|n| n.name == "FLOAT").unwrap();
        assert_eq!(float.pinref_count(), 0);
        assert_eq!(float.wires().count(), 1);
    }
}
