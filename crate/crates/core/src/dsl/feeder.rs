//! Parser for feeder descriptions (`.net`).

use std::path::Path;

use super::cursor::Cursor;
use super::error::{DslError, ParseError};
use super::lexer::lex;
use crate::gridsim::{check_breakpoints, Bems, Bus, CurveDef, FeederModel, Line, SlackBus, TopologyError};
use crate::gridsim::DEFAULT_CURVE_NAME;
use crate::model::{SourcePos, Unit};

/// Parses and validates a radial feeder.
///
/// ```text
/// slack B0 230 V
/// bus B1 load 2000 W 0 var
/// line B0 B1 r 0.5 ohm x 0.5 ohm
/// bems B1 qmax 3000 var curve steep pv 6000 W
/// curve steep 1.0 1.01 1.045 1.05
/// ```
pub fn parse_feeder(text: &str, file: impl AsRef<Path>) -> Result<FeederModel, DslError> {
    let file = file.as_ref();
    let (lines, line_count) = lex(text, file)?;
    let mut slack: Option<SlackBus> = None;
    let mut slack_pos = None;
    let mut buses = Vec::new();
    let mut feeder_lines = Vec::new();
    let mut bems = Vec::new();
    let mut curves = Vec::new();
    let mut pos_of = Positions::default();

    for line in &lines {
        let mut c = Cursor::new(file, line);
        let pos = c.pos();
        let head = match c.peek_word() {
            Some(w @ ("slack" | "bus" | "line" | "bems" | "curve")) => {
                c.word("feeder declaration")?;
                w
            }
            _ => return Err(c.error("feeder declaration (slack, bus, line, bems, curve)").into()),
        };
        match head {
            "slack" => {
                let id = c.name("bus id")?;
                let v_pos = c.pos();
                let voltage = c.quantity("slack voltage", Unit::Volts)?;
                if voltage <= 0.0 {
                    return Err(ParseError::new(v_pos, "positive slack voltage", super::format_number(voltage)).into());
                }
                if slack.is_some() {
                    return Err(DslError::Topology {
                        source: TopologyError::DuplicateSlack(id),
                        pos,
                    });
                }
                pos_of.buses.push((id.clone(), pos.clone()));
                slack = Some(SlackBus { id, voltage });
                slack_pos = Some(pos);
            }
            "bus" => {
                let id = c.name("bus id")?;
                let (mut p_load, mut q_load) = (0.0, 0.0);
                if c.eat_keyword("load") {
                    p_load = c.quantity("active load", Unit::Watts)?;
                    q_load = c.quantity("reactive load", Unit::Vars)?;
                }
                pos_of.buses.push((id.clone(), pos));
                buses.push(Bus { id, p_load, q_load });
            }
            "line" => {
                let from = c.name("bus id")?;
                let to = c.name("bus id")?;
                c.keyword("r")?;
                let r = c.quantity("resistance", Unit::Ohms)?;
                c.keyword("x")?;
                let x = c.quantity("reactance", Unit::Ohms)?;
                pos_of.lines.push((from.clone(), to.clone(), pos));
                feeder_lines.push(Line { from, to, r, x });
            }
            "bems" => {
                let bus = c.name("bus id")?;
                c.keyword("qmax")?;
                let q_max = c.quantity("reactive power rating", Unit::Vars)?;
                let mut curve = None;
                let mut pv = None;
                while !c.at_end() {
                    if curve.is_none() && c.eat_keyword("curve") {
                        curve = Some(c.name("curve name")?);
                    } else if pv.is_none() && c.eat_keyword("pv") {
                        pv = Some(c.quantity("pv generation", Unit::Watts)?);
                    } else {
                        return Err(c.error("`curve`, `pv` or end of line").into());
                    }
                }
                let curve = curve.unwrap_or_else(|| DEFAULT_CURVE_NAME.to_owned());
                pos_of.bems.push((bus.clone(), curve.clone(), pos));
                bems.push(Bems {
                    bus,
                    q_max,
                    curve,
                    pv: pv.unwrap_or(0.0),
                });
            }
            "curve" => {
                let name = c.name("curve name")?;
                let bp_pos = c.pos();
                let mut points = [0.0; 4];
                for p in &mut points {
                    *p = c.number("breakpoint")?;
                }
                check_breakpoints(points).map_err(|_| {
                    ParseError::new(
                        bp_pos,
                        "breakpoints with 0 < v1 <= v2 <= v3 <= v4",
                        points.map(super::format_number).join(" "),
                    )
                })?;
                pos_of.curves.push((name.clone(), pos));
                curves.push(CurveDef {
                    name,
                    breakpoints: points,
                });
            }
            _ => unreachable!("head filtered above"),
        }
        c.end()?;
    }

    let Some(slack) = slack else {
        return Err(DslError::Topology {
            source: TopologyError::MissingSlack,
            pos: SourcePos::new(file, line_count.max(1), 1),
        });
    };
    let fallback = slack_pos.expect("slack position recorded");
    FeederModel::new(slack, buses, feeder_lines, bems, curves).map_err(|source| {
        let pos = pos_of.locate(&source).unwrap_or(fallback);
        DslError::Topology { source, pos }
    })
}

/// Declaration positions used to anchor topology errors.
#[derive(Default)]
struct Positions {
    buses: Vec<(String, SourcePos)>,
    lines: Vec<(String, String, SourcePos)>,
    bems: Vec<(String, String, SourcePos)>,
    curves: Vec<(String, SourcePos)>,
}

impl Positions {
    fn locate(&self, err: &TopologyError) -> Option<SourcePos> {
        let line_between = |a: &str, b: &str| {
            self.lines
                .iter()
                .rev()
                .find(|(f, t, _)| f == a && t == b)
                .map(|(_, _, p)| p.clone())
        };
        let bems_at = |bus: &str| self.bems.iter().rev().find(|(b, _, _)| b == bus).map(|(_, _, p)| p.clone());
        match err {
            TopologyError::NotATree(a, b) | TopologyError::InvalidLine(a, b) => line_between(a, b),
            TopologyError::DisconnectedBus(id) => self
                .lines
                .iter()
                .find(|(f, t, _)| f == id || t == id)
                .map(|(_, _, p)| p.clone())
                .or_else(|| self.bems.iter().find(|(b, _, _)| b == id).map(|(_, _, p)| p.clone()))
                .or_else(|| self.buses.iter().find(|(b, _)| b == id).map(|(_, p)| p.clone())),
            TopologyError::DuplicateBus(id) => self.buses.iter().rev().find(|(b, _)| b == id).map(|(_, p)| p.clone()),
            TopologyError::DuplicateBems(bus) | TopologyError::BemsAtSlack(bus) | TopologyError::InvalidBems(bus) => {
                bems_at(bus)
            }
            TopologyError::UnknownCurve(name) => self.bems.iter().find(|(_, c, _)| c == name).map(|(_, _, p)| p.clone()),
            TopologyError::DuplicateCurve(name) => {
                self.curves.iter().rev().find(|(c, _)| c == name).map(|(_, p)| p.clone())
            }
            TopologyError::DuplicateSlack(_) | TopologyError::MissingSlack => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BUS: &str = "slack B0 230.0\nbus B1 load 2000 0\nline B0 B1 r 0.5 x 0.5\n";

    fn topo(text: &str) -> (&'static str, usize) {
        match parse_feeder(text, "f.net").unwrap_err() {
            DslError::Topology { source, pos } => (source.category(), pos.line),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn two_bus_fixture() {
        let f = parse_feeder(TWO_BUS, "f.net").unwrap();
        assert_eq!(f.lines().len(), 1);
        assert_eq!(f.bus_ids(), vec!["B0", "B1"]);
        assert_eq!(f.buses()[0].p_load, 2000.0);
        assert_eq!(f.slack().voltage, 230.0);
    }

    #[test]
    fn units_are_checked() {
        let ok = "slack B0 230 V\nbus B1 load 2000 W 0 var\nline B0 B1 r 0.5 ohm x 0.5 ohm\n";
        assert_eq!(parse_feeder(ok, "f.net").unwrap(), parse_feeder(TWO_BUS, "f.net").unwrap());
        let bad = "slack B0 230 V\nbus B1 load 2000 var 0\nline B0 B1 r 0.5 x 0.5\n";
        assert_eq!(
            parse_feeder(bad, "f.net").unwrap_err().to_string(),
            "f.net:2:18: expected unit `W`, found `var`"
        );
    }

    #[test]
    fn bems_and_curves() {
        let text = format!("{TWO_BUS}bems B1 qmax 3000 pv 6000 curve steep\ncurve steep 1.0 1.01 1.045 1.05\n");
        let f = parse_feeder(&text, "f.net").unwrap();
        assert_eq!(f.bems()[0].curve, "steep");
        assert_eq!(f.bems()[0].pv, 6000.0);
        assert_eq!(f.curve("steep").unwrap().breakpoints, [1.0, 1.01, 1.045, 1.05]);
    }

    #[test]
    fn topology_errors() {
        assert_eq!(topo(&format!("{TWO_BUS}slack B9 230")), ("duplicate slack", 4));
        assert_eq!(topo(&format!("{TWO_BUS}line B1 B9 r 1 x 1")), ("disconnected bus", 4));
        assert_eq!(topo(&format!("{TWO_BUS}bus B2\n")), ("disconnected bus", 4));
        assert_eq!(
            topo(&format!("{TWO_BUS}bus B2\nline B1 B2 r 1 x 1\nline B0 B2 r 1 x 1\n")),
            ("not a tree", 6)
        );
        assert_eq!(topo("bus B1\n"), ("missing slack", 1));
        assert_eq!(topo(&format!("{TWO_BUS}bems B1 qmax 10 curve nope\n")), ("unknown curve", 4));
    }

    #[test]
    fn syntax_errors() {
        let e = parse_feeder("slack B0 230\nwire B0 B1", "f.net").unwrap_err();
        assert_eq!(
            e.to_string(),
            "f.net:2:1: expected feeder declaration (slack, bus, line, bems, curve), found `wire`"
        );
        let e = parse_feeder("slack B0 -5", "f.net").unwrap_err();
        assert!(e.to_string().contains("positive slack voltage"));
        let e = parse_feeder("slack B0 230\ncurve c 1.1 1.0 1.2 1.3", "f.net").unwrap_err();
        assert_eq!(e.pos().line, 2);
    }
}
