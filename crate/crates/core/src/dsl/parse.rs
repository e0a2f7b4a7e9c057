//! Parser for hazard models (`.haz`) and test hierarchies (`.htd`).

use std::path::{Path, PathBuf};

use super::cursor::{parse_finite, Cursor};
use super::error::{DslError, ParseError};
use super::lexer::{lex, LineToks, TokKind};
use crate::gridsim::check_breakpoints;
use crate::model::*;

const MODEL_HEADS: [&str; 9] = [
    "loss",
    "hazard",
    "constraint",
    "controlloop",
    "hca",
    "factor",
    "component",
    "threat",
    "scenario",
];
const TEST_HEADS: [&str; 2] = ["testspec", "experiment"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Heads {
    Model,
    Tests,
    All,
}

impl Heads {
    fn allows(self, head: &str) -> bool {
        let model = MODEL_HEADS.contains(&head);
        let tests = TEST_HEADS.contains(&head);
        match self {
            Heads::Model => model,
            Heads::Tests => tests,
            Heads::All => model || tests,
        }
    }

    fn expected(self) -> &'static str {
        match self {
            Heads::Model => "hazard model declaration",
            Heads::Tests => "`testspec` or `experiment`",
            Heads::All => "declaration",
        }
    }
}

/// Parses a hazard-model document into a bundle fragment.
pub fn parse_model(text: &str, file: impl AsRef<Path>) -> Result<ModelBundle, DslError> {
    parse_with(text, file.as_ref(), Heads::Model)
}

/// Parses a test-hierarchy document (`testspec` and `experiment` blocks).
pub fn parse_testspec(text: &str, file: impl AsRef<Path>) -> Result<ModelBundle, DslError> {
    parse_with(text, file.as_ref(), Heads::Tests)
}

/// Parses a document that may mix every declaration kind, such as the
/// output of [`super::serialize_bundle`].
pub fn parse_bundle(text: &str, file: impl AsRef<Path>) -> Result<ModelBundle, DslError> {
    parse_with(text, file.as_ref(), Heads::All)
}

fn parse_with(text: &str, file: &Path, heads: Heads) -> Result<ModelBundle, DslError> {
    let (lines, line_count) = lex(text, file)?;
    let mut p = Parser {
        file,
        lines: &lines,
        line_count,
        next: 0,
    };
    p.document(heads)
}

fn duplicate_field(pos: SourcePos, field: &str) -> ParseError {
    ParseError::new(pos, format!("at most one `{field}`"), format!("second `{field}`"))
}

struct Parser<'a> {
    file: &'a Path,
    lines: &'a [LineToks],
    line_count: usize,
    next: usize,
}

impl<'a> Parser<'a> {
    fn next_line(&mut self) -> Option<&'a LineToks> {
        let line = self.lines.get(self.next)?;
        self.next += 1;
        Some(line)
    }

    /// Next line inside a block, or `None` once the closing brace is consumed.
    fn block_line(&mut self, what: &str) -> Result<Option<Cursor<'a>>, ParseError> {
        let Some(line) = self.next_line() else {
            let col = self
                .lines
                .last()
                .filter(|l| l.line == self.line_count)
                .map_or(1, |l| l.end_col);
            return Err(ParseError::new(
                SourcePos::new(self.file, self.line_count.max(1), col),
                format!("`}}` closing {what}"),
                "end of input",
            ));
        };
        let mut c = Cursor::new(self.file, line);
        if c.peek().map(|t| &t.kind) == Some(&TokKind::RBrace) {
            c.punct(TokKind::RBrace, "`}`")?;
            c.end()?;
            return Ok(None);
        }
        Ok(Some(c))
    }

    fn document(&mut self, heads: Heads) -> Result<ModelBundle, DslError> {
        let mut bundle = ModelBundle::new();
        while let Some(line) = self.next_line() {
            let mut c = Cursor::new(self.file, line);
            let pos = c.pos();
            let head = match c.peek_word() {
                Some(w) if heads.allows(w) => c.word("declaration")?,
                _ => return Err(c.error(heads.expected()).into()),
            };
            let item = match head {
                "loss" => loss(c)?,
                "hazard" => hazard(c)?,
                "constraint" => constraint(c)?,
                "controlloop" => self.control_loop(c)?,
                "hca" => hca(c)?,
                "factor" => factor(c)?,
                "component" => component(c)?,
                "threat" => threat(c)?,
                "scenario" => self.scenario(c, &pos)?,
                "testspec" => self.test_spec(c, &pos)?,
                "experiment" => self.experiment(c, &pos)?,
                _ => unreachable!("head filtered above"),
            };
            bundle
                .register(item, Some(pos.clone()))
                .map_err(|e| match e {
                    ModelError::DuplicateId { id, kind } => DslError::DuplicateId { id, kind, pos },
                })?;
        }
        Ok(bundle)
    }

    fn open_block(c: &mut Cursor<'_>) -> Result<(), ParseError> {
        c.punct(TokKind::LBrace, "`{`")?;
        c.end()
    }

    fn control_loop(&mut self, mut c: Cursor<'a>) -> Result<Item, DslError> {
        let id = c.id(IdPattern::Free)?;
        Self::open_block(&mut c)?;
        let mut lp = ControlLoop {
            id,
            nodes: Vec::new(),
            actions: Vec::new(),
            links: Vec::new(),
        };
        let mut link_pos = Vec::new();
        while let Some(mut c) = self.block_line("control loop")? {
            let field_pos = c.pos();
            let field = c.word("control loop entry")?;
            if let Some(role) = NodeRole::ALL.into_iter().find(|r| r.keyword() == field) {
                let name_pos = c.pos();
                let name = c.name("node name")?;
                if lp.has_node(&name) {
                    return Err(ParseError::new(name_pos, "new node name", format!("`{name}`")).into());
                }
                lp.nodes.push(Node { role, name });
            } else if field == "action" {
                let name_pos = c.pos();
                let name = c.name("action name")?;
                if lp.action(&name).is_some() {
                    return Err(ParseError::new(name_pos, "new action name", format!("`{name}`")).into());
                }
                c.keyword("levels")?;
                let mut levels: Vec<String> = Vec::new();
                loop {
                    let level_pos = c.pos();
                    let level = match c.peek_word() {
                        Some(w) if is_identifier(w) && !w.contains('.') => c.name("level name")?,
                        _ => return Err(c.error("level name").into()),
                    };
                    if levels.contains(&level) {
                        return Err(ParseError::new(level_pos, "new level name", format!("`{level}`")).into());
                    }
                    levels.push(level);
                    if c.at_end() {
                        break;
                    }
                }
                lp.actions.push(ControlAction { name, levels });
            } else if field == "link" {
                let id = c.id(IdPattern::Free)?;
                let from_pos = c.pos();
                let from = c.name("node name")?;
                c.keyword("->")?;
                let to_pos = c.pos();
                let to = c.name("node name")?;
                let kind = match c.peek_word() {
                    Some("command") => LinkKind::Command,
                    Some("feedback") => LinkKind::Feedback,
                    _ => return Err(c.error("`command` or `feedback`").into()),
                };
                c.word("link kind")?;
                link_pos.push((from_pos, to_pos));
                lp.links.push(Link { id, from, to, kind });
            } else {
                return Err(ParseError::new(field_pos, "control loop entry", format!("`{field}`")).into());
            }
            c.end()?;
        }
        for (link, (from_pos, to_pos)) in lp.links.iter().zip(link_pos) {
            for (end, pos) in [(&link.from, from_pos), (&link.to, to_pos)] {
                if !lp.has_node(end) {
                    return Err(ParseError::new(
                        pos,
                        format!("node declared in control loop {}", lp.id),
                        format!("`{end}`"),
                    )
                    .into());
                }
            }
        }
        Ok(Item::ControlLoop(lp))
    }

    fn scenario(&mut self, mut c: Cursor<'a>, head: &SourcePos) -> Result<Item, DslError> {
        let id = c.id(IdPattern::Scenario)?;
        Self::open_block(&mut c)?;
        let mut title = None;
        let mut hazards = Vec::new();
        let mut losses = Vec::new();
        let mut hcas = Vec::new();
        let mut factors = Vec::new();
        let mut components = Vec::new();
        let mut threats = Vec::new();
        let mut safety_constraint: Option<String> = None;
        while let Some(mut c) = self.block_line("scenario")? {
            let field_pos = c.pos();
            let field = c.word("scenario field")?;
            match field {
                "title" => {
                    if title.is_some() {
                        return Err(duplicate_field(field_pos, field).into());
                    }
                    title = Some(c.string("scenario title")?);
                }
                "hazards" => hazards.extend(c.ids_to_end(IdPattern::Hazard)?),
                "losses" => losses.extend(c.ids_to_end(IdPattern::Loss)?),
                "hcas" => hcas.extend(c.ids_to_end(IdPattern::Hca)?),
                "factors" => factors.extend(c.ids_to_end(IdPattern::Factor)?),
                "components" => components.extend(c.ids_to_end(IdPattern::Free)?),
                "threats" => threats.extend(c.ids_to_end(IdPattern::Free)?),
                "safety_constraint" => {
                    if safety_constraint.is_some() {
                        return Err(duplicate_field(field_pos, field).into());
                    }
                    safety_constraint = Some(c.string("safety constraint text")?);
                }
                _ => {
                    return Err(ParseError::new(field_pos, "scenario field", format!("`{field}`")).into());
                }
            }
            c.end()?;
        }
        let missing = |name: &str| DslError::MissingField {
            name: name.to_owned(),
            pos: head.clone(),
        };
        let title = title.ok_or_else(|| missing("title"))?;
        if hazards.is_empty() {
            return Err(missing("hazards"));
        }
        Ok(Item::Scenario(HazardScenario {
            id,
            title,
            hazards,
            losses,
            hcas,
            factors,
            components,
            threats,
            safety_constraint: safety_constraint.unwrap_or_default(),
        }))
    }

    fn test_spec(&mut self, mut c: Cursor<'a>, head: &SourcePos) -> Result<Item, DslError> {
        let id = c.id(IdPattern::TestSpec)?;
        Self::open_block(&mut c)?;
        let mut from_scenario = None;
        let mut title = None;
        let mut rationale: Option<String> = None;
        let mut target_measures = Vec::new();
        let mut controllable: Vec<Parameter> = Vec::new();
        let mut uncontrollable = Vec::new();
        let mut measured = Vec::new();
        let mut initial = None;
        let mut uncertainty_sources = Vec::new();
        let mut case_attributes: Vec<(CaseAttribute, String)> = Vec::new();
        while let Some(mut c) = self.block_line("testspec")? {
            let field_pos = c.pos();
            let field = c.word("testspec field")?;
            match field {
                "from_scenario" => {
                    if from_scenario.is_some() {
                        return Err(duplicate_field(field_pos, field).into());
                    }
                    from_scenario = Some(c.id(IdPattern::Scenario)?);
                }
                "title" => {
                    if title.is_some() {
                        return Err(duplicate_field(field_pos, field).into());
                    }
                    title = Some(c.string("test title")?);
                }
                "rationale" => {
                    if rationale.is_some() {
                        return Err(duplicate_field(field_pos, field).into());
                    }
                    rationale = Some(c.string("rationale text")?);
                }
                "measure" => target_measures.push(c.text("target measure")?),
                "vary" => {
                    let p = parameter(&mut c)?;
                    if controllable.iter().any(|q| q.name == p.name) {
                        return Err(duplicate_field(field_pos, &format!("vary {}", p.name)).into());
                    }
                    controllable.push(p);
                }
                "fixed" => uncontrollable.push(c.text("uncontrollable factor")?),
                "measured" => measured.push(c.text("measured quantity")?),
                "initial" => {
                    if initial.is_some() {
                        return Err(duplicate_field(field_pos, field).into());
                    }
                    c.keyword("nominal")?;
                    let nominal_voltage = c.quantity("nominal voltage", Unit::Volts)?;
                    c.keyword("tolerance")?;
                    let tolerance = c.number("tolerance")?;
                    c.keyword("delay")?;
                    let initial_delay = c.quantity("initial delay", Unit::Seconds)?;
                    let state = InitialState {
                        nominal_voltage,
                        tolerance,
                        initial_delay,
                    };
                    if !state.is_valid() {
                        return Err(ParseError::new(
                            field_pos,
                            "nominal > 0, 0 < tolerance < 1 and delay >= 0",
                            format!("nominal {nominal_voltage}, tolerance {tolerance}, delay {initial_delay}"),
                        )
                        .into());
                    }
                    initial = Some(state);
                }
                "uncertainty" => uncertainty_sources.extend(c.names_to_end("uncertainty source")?),
                _ => match CaseAttribute::from_keyword(field) {
                    Some(attr) => {
                        if case_attributes.iter().any(|(a, _)| *a == attr) {
                            return Err(duplicate_field(field_pos, field).into());
                        }
                        case_attributes.push((attr, c.string("attribute text")?));
                    }
                    None => {
                        return Err(ParseError::new(field_pos, "testspec field", format!("`{field}`")).into());
                    }
                },
            }
            c.end()?;
        }
        let missing = |name: &str| DslError::MissingField {
            name: name.to_owned(),
            pos: head.clone(),
        };
        Ok(Item::TestSpec(TestSpecification {
            id,
            title: title.ok_or_else(|| missing("title"))?,
            from_scenario: from_scenario.ok_or_else(|| missing("from_scenario"))?,
            initial_state: initial.ok_or_else(|| missing("initial"))?,
            rationale: rationale.unwrap_or_default(),
            target_measures,
            controllable,
            uncontrollable,
            measured,
            uncertainty_sources,
            case_attributes,
        }))
    }

    fn experiment(&mut self, mut c: Cursor<'a>, head: &SourcePos) -> Result<Item, DslError> {
        let id = c.id(IdPattern::Experiment)?;
        Self::open_block(&mut c)?;
        let mut from_test = None;
        let mut feeder = None;
        let mut dt = None;
        let mut duration: Option<(f64, SourcePos)> = None;
        let mut droop = None;
        let mut sweep: Vec<Parameter> = Vec::new();
        let mut attacks: Vec<(AttackSpec, SourcePos)> = Vec::new();
        while let Some(mut c) = self.block_line("experiment")? {
            let field_pos = c.pos();
            let field = c.word("experiment field")?;
            let once = |set: bool| {
                if set {
                    Err(duplicate_field(field_pos.clone(), field))
                } else {
                    Ok(())
                }
            };
            match field {
                "from_test" => {
                    once(from_test.is_some())?;
                    from_test = Some(c.id(IdPattern::TestSpec)?);
                }
                "feeder" => {
                    once(feeder.is_some())?;
                    feeder = Some(PathBuf::from(c.text("feeder path")?));
                }
                "dt" => {
                    once(dt.is_some())?;
                    let v_pos = c.pos();
                    let v = c.quantity("timestep", Unit::Seconds)?;
                    if v <= 0.0 {
                        return Err(ParseError::new(v_pos, "positive timestep", super::format_number(v)).into());
                    }
                    dt = Some(v);
                }
                "duration" => {
                    once(duration.is_some())?;
                    let v_pos = c.pos();
                    let v = c.quantity("duration", Unit::Seconds)?;
                    duration = Some((v, v_pos));
                }
                "droop" => {
                    once(droop.is_some())?;
                    droop = Some(droop_spec(&mut c)?);
                }
                "sweep" => {
                    let p = parameter(&mut c)?;
                    if sweep.iter().any(|q| q.name == p.name) {
                        return Err(duplicate_field(field_pos, &format!("sweep {}", p.name)).into());
                    }
                    sweep.push(p);
                }
                "attack" => attacks.push((attack(&mut c)?, field_pos)),
                _ => {
                    return Err(ParseError::new(field_pos, "experiment field", format!("`{field}`")).into());
                }
            }
            c.end()?;
        }
        let missing = |name: &str| DslError::MissingField {
            name: name.to_owned(),
            pos: head.clone(),
        };
        let from_test = from_test.ok_or_else(|| missing("from_test"))?;
        let feeder_path = feeder.ok_or_else(|| missing("feeder"))?;
        let dt = dt.ok_or_else(|| missing("dt"))?;
        let (duration, duration_pos) = duration.ok_or_else(|| missing("duration"))?;
        if duration < 10.0 * dt * (1.0 - 1e-9) {
            return Err(ParseError::new(
                duration_pos,
                format!("duration of at least 10 timesteps ({} s)", super::format_number(10.0 * dt)),
                super::format_number(duration),
            )
            .into());
        }
        for (a, pos) in &attacks {
            if a.end > duration {
                return Err(ParseError::new(
                    pos.clone(),
                    format!("attack ending within the duration ({} s)", super::format_number(duration)),
                    format!("end {}", super::format_number(a.end)),
                )
                .into());
            }
        }
        Ok(Item::Experiment(ExperimentSpecification {
            id,
            from_test,
            feeder_path,
            dt,
            duration,
            droop: droop.unwrap_or_else(|| DroopSpec::Named(crate::gridsim::DEFAULT_CURVE_NAME.to_owned())),
            sweep,
            attacks: attacks.into_iter().map(|(a, _)| a).collect(),
        }))
    }
}

fn loss(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id = c.id(IdPattern::Loss)?;
    let description = c.string("loss description")?;
    c.end()?;
    Ok(Item::Loss(Loss { id, description }))
}

fn hazard(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id = c.id(IdPattern::Hazard)?;
    let description = match c.peek().map(|t| &t.kind) {
        Some(TokKind::Str(_)) => c.string("hazard description")?,
        _ => String::new(),
    };
    c.keyword("->")?;
    let leads_to = c.ids_to_end(IdPattern::Loss)?;
    Ok(Item::Hazard(Hazard {
        id,
        description,
        leads_to,
    }))
}

fn constraint(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id = c.id(IdPattern::Constraint)?;
    c.keyword("negates")?;
    let negates = c.id(IdPattern::Hazard)?;
    let text = c.string("constraint text")?;
    c.end()?;
    Ok(Item::Constraint(Constraint { id, negates, text }))
}

fn hca(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id = c.id(IdPattern::Hca)?;
    c.keyword("action")?;
    let split = c
        .peek_word()
        .and_then(|w| w.rsplit_once('.'))
        .filter(|(a, l)| is_identifier(a) && is_identifier(l));
    let Some((action, level)) = split else {
        return Err(c.error("`<action>.<level>`").into());
    };
    c.word("action")?;
    c.keyword("when")?;
    let guideword = match c.peek_word().and_then(Guideword::from_keyword) {
        Some(g) => g,
        None => return Err(c.error("guideword (any_time, too_early, too_late, not_applied)").into()),
    };
    c.word("guideword")?;
    c.keyword("causes")?;
    let causes = c.id(IdPattern::Hazard)?;
    let qualified = c.eat_keyword("qualified");
    c.end()?;
    Ok(Item::Hca(HazardousControlAction {
        id,
        action: action.to_owned(),
        level: level.to_owned(),
        guideword,
        causes,
        qualified,
    }))
}

fn factor(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id = c.id(IdPattern::Factor)?;
    let class = match c.peek_word().and_then(FactorClass::from_keyword) {
        Some(k) => k,
        None => return Err(c.error("factor class (delay, inadequate_operation, other)").into()),
    };
    c.word("factor class")?;
    let description = c.string("factor description")?;
    c.keyword("at")?;
    let at = c.name("link id or node name")?;
    c.end()?;
    Ok(Item::Factor(CausalFactor {
        id,
        class,
        description,
        at,
    }))
}

fn component(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id = c.id(IdPattern::Free)?;
    let kind = match c.peek_word() {
        Some("device") => ComponentKind::Device,
        Some("network") => ComponentKind::Network,
        _ => return Err(c.error("`device` or `network`").into()),
    };
    c.word("component kind")?;
    c.keyword("realizes")?;
    let realizes = c.names_to_end("link id or node name")?;
    Ok(Item::Component(Component { id, kind, realizes }))
}

fn threat(mut c: Cursor<'_>) -> Result<Item, DslError> {
    let id_pos = c.pos();
    let id = c.id(IdPattern::Free)?;
    let (class, description) = match c.peek_word().and_then(ThreatClass::from_keyword) {
        Some(class) => {
            c.word("threat class")?;
            (class, c.string("threat description")?)
        }
        None => match builtin_threats().iter().find(|t| t.id == id.as_str()) {
            Some(t) if c.peek_word() == Some("applies") => (t.class, t.description.to_owned()),
            Some(_) => return Err(c.error("threat class or `applies`").into()),
            None if c.peek_word() == Some("applies") => {
                return Err(ParseError::new(id_pos, "built-in threat id when class is omitted", format!("`{id}`")).into());
            }
            None => return Err(c.error("threat class (availability, integrity, confidentiality)").into()),
        },
    };
    c.keyword("applies")?;
    let applies_to = c.ids_to_end(IdPattern::Free)?;
    Ok(Item::Threat(SecurityConstraint {
        id,
        description,
        class,
        applies_to,
    }))
}

/// `NAME [v, ...] [unit]`
fn parameter(c: &mut Cursor<'_>) -> Result<Parameter, ParseError> {
    let name = c.name("parameter name")?;
    let values = c.value_list()?;
    let unit = c.any_unit();
    Ok(Parameter { name, values, unit })
}

fn droop_spec(c: &mut Cursor<'_>) -> Result<DroopSpec, ParseError> {
    if c.peek_word().and_then(parse_finite).is_none() {
        return Ok(DroopSpec::Named(c.name("curve name or four breakpoints")?));
    }
    let pos = c.pos();
    let mut points = [0.0; 4];
    for p in &mut points {
        *p = c.number("breakpoint")?;
    }
    check_breakpoints(points).map_err(|_| {
        ParseError::new(
            pos,
            "breakpoints with 0 < v1 <= v2 <= v3 <= v4",
            points.map(super::format_number).join(" "),
        )
    })?;
    Ok(DroopSpec::Inline(points))
}

/// `KIND BUS from T [s] to T [s] [magnitude T [s]]`
fn attack(c: &mut Cursor<'_>) -> Result<AttackSpec, ParseError> {
    let kind = match c.peek_word() {
        Some("extra_delay") => AttackKind::ExtraDelay,
        Some("drop") => AttackKind::Drop,
        _ => return Err(c.error("`extra_delay` or `drop`")),
    };
    c.word("attack kind")?;
    let target = c.name("bems bus id")?;
    c.keyword("from")?;
    let start_pos = c.pos();
    let start = c.quantity("attack start", Unit::Seconds)?;
    c.keyword("to")?;
    let end_pos = c.pos();
    let end = c.quantity("attack end", Unit::Seconds)?;
    if start < 0.0 {
        return Err(ParseError::new(start_pos, "non-negative start time", super::format_number(start)));
    }
    if end <= start {
        return Err(ParseError::new(end_pos, "end time after start", super::format_number(end)));
    }
    let magnitude = match kind {
        AttackKind::ExtraDelay => {
            c.keyword("magnitude")?;
            let pos = c.pos();
            let m = c.quantity("extra delay", Unit::Seconds)?;
            if m < 0.0 {
                return Err(ParseError::new(pos, "non-negative extra delay", super::format_number(m)));
            }
            Some(m)
        }
        AttackKind::Drop => None,
    };
    Ok(AttackSpec {
        kind,
        target,
        start,
        end,
        magnitude,
    })
}
