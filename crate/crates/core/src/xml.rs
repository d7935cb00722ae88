//! XML codecs for the proposal database and for user profiles.
//!
//! Proposal database layout:
//!
//! ```xml
//! <JPD>
//!   <JobProposal JID="J1" JURL="http://...">
//!     <JTopicSet><Topic name="java"/></JTopicSet>
//!     <JCharacteristicSet>
//!       <Characteristic feature="salary" type="number" value="50000" unit="EUR"/>
//!     </JCharacteristicSet>
//!   </JobProposal>
//! </JPD>
//! ```
//!
//! Profile layout:
//!
//! ```xml
//! <UserProfile uid="u1" clock="3">
//!   <Topic name="java" count="2" firstTimeStamp="1"/>
//!   <Constraint feature="city" kind="exact-string" value="Rome"/>
//!   <PastQuery sigma="0.5" alpha="0.55"/>
//! </UserProfile>
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};

use crate::error::{invalid, Error, Result};
use crate::model::{
    join_set, CharValue, Constraint, ConstraintKind, JobProposal, PastQuery, ProfileTopic, Topic,
    UserProfile,
};

/// A proposal element that failed schema validation.
#[derive(Clone, Debug, PartialEq)]
pub struct Reject {
    /// Zero-based position of the element among `JobProposal` elements.
    pub index: usize,
    pub jid: Option<String>,
    pub line: usize,
    pub reason: String,
}

/// Outcome of loading a proposal document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct XmlLoad {
    pub proposals: Vec<JobProposal>,
    pub rejects: Vec<Reject>,
}

fn line_at(src: &str, pos: usize) -> usize {
    let bytes = src.as_bytes();
    let mut end = pos.min(src.len());
    while end < bytes.len() && bytes[end].is_ascii_whitespace() {
        end += 1;
    }
    bytes[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

fn attrs(e: &BytesStart<'_>) -> std::result::Result<HashMap<String, String>, String> {
    let mut out = HashMap::new();
    for a in e.attributes() {
        let a = a.map_err(|err| err.to_string())?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let value = a.unescape_value().map_err(|err| err.to_string())?;
        out.insert(key, value.into_owned());
    }
    Ok(out)
}

#[derive(Default)]
struct PendingProposal {
    jid: Option<String>,
    jurl: String,
    line: usize,
    topics: Option<Vec<String>>,
    characteristics: IndexMap<String, CharValue>,
    problem: Option<String>,
}

impl PendingProposal {
    fn fail(&mut self, reason: String) {
        self.problem.get_or_insert(reason);
    }

    fn finish(self, index: usize) -> std::result::Result<JobProposal, Reject> {
        let reject = |jid: Option<String>, reason: String| Reject {
            index,
            jid,
            line: self.line,
            reason,
        };
        if let Some(reason) = self.problem {
            return Err(reject(self.jid, reason));
        }
        let Some(topics) = self.topics else {
            return Err(reject(self.jid, "missing JTopicSet".into()));
        };
        let jid = self.jid.clone().unwrap_or_default();
        let mut proposal = JobProposal::new(&jid, &self.jurl, topics)
            .map_err(|e| reject(self.jid.clone(), e.to_string()))?;
        proposal.characteristics = self.characteristics;
        proposal
            .validate()
            .map_err(|e| reject(self.jid.clone(), e.to_string()))?;
        Ok(proposal)
    }
}

fn parse_characteristic(a: &HashMap<String, String>) -> std::result::Result<(String, CharValue), String> {
    let feature = a
        .get("feature")
        .map(|f| f.trim().to_string())
        .filter(|f| !f.is_empty())
        .ok_or("Characteristic without feature")?;
    let raw = a.get("value").ok_or("Characteristic without value")?;
    let value = match a.get("type").map(String::as_str) {
        Some("number") => {
            let value = raw
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{feature}: `{raw}` is not a number"))?;
            CharValue::Number {
                value,
                unit: a.get("unit").cloned(),
            }
        }
        Some("string") => CharValue::text(raw),
        Some("set") => CharValue::set(raw.split(',')),
        Some(other) => return Err(format!("{feature}: unknown type `{other}`")),
        None => return Err(format!("{feature}: missing type")),
    };
    Ok((feature, value))
}

/// Parses a proposal document held in memory.
///
/// Malformed XML is fatal; schema violations inside a `JobProposal`
/// reject only that element.
pub fn parse_jpd(src: &str, origin: &Path) -> Result<XmlLoad> {
    let mut reader = Reader::from_str(src);
    reader.config_mut().trim_text(true);

    let fatal = |pos: usize, message: String| Error::XmlParse {
        path: origin.to_path_buf(),
        line: line_at(src, pos),
        message,
    };

    let mut out = XmlLoad::default();
    let mut seen_root = false;
    let mut current: Option<PendingProposal> = None;
    let mut in_topics = false;
    let mut in_chars = false;
    let mut index = 0;

    loop {
        let pos = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|e| fatal(reader.error_position() as usize, e.to_string()))?;
        let (e, empty) = match event {
            Event::Eof => break,
            Event::Start(e) => (e, false),
            Event::Empty(e) => (e, true),
            Event::End(e) => {
                match e.name().as_ref() {
                    b"JobProposal" => {
                        if let Some(p) = current.take() {
                            match p.finish(index) {
                                Ok(p) => out.proposals.push(p),
                                Err(r) => out.rejects.push(r),
                            }
                            index += 1;
                        }
                    }
                    b"JTopicSet" => in_topics = false,
                    b"JCharacteristicSet" => in_chars = false,
                    _ => {}
                }
                continue;
            }
            _ => continue,
        };

        let name = e.name().as_ref().to_vec();
        let a = attrs(&e).map_err(|m| fatal(pos, m))?;
        if !seen_root {
            if name != b"JPD" {
                return Err(fatal(pos, "root element must be <JPD>".into()));
            }
            seen_root = true;
            continue;
        }
        match name.as_slice() {
            b"JobProposal" => {
                let mut p = PendingProposal {
                    jid: a.get("JID").map(|s| s.trim().to_string()),
                    jurl: a.get("JURL").cloned().unwrap_or_default(),
                    line: line_at(src, pos),
                    ..Default::default()
                };
                if p.jid.as_deref().map_or(true, str::is_empty) {
                    p.fail("missing JID".into());
                }
                if empty {
                    let r = p.finish(index).err().expect("no topic set");
                    out.rejects.push(r);
                    index += 1;
                } else {
                    current = Some(p);
                }
            }
            b"JTopicSet" => {
                if let Some(p) = current.as_mut() {
                    p.topics.get_or_insert_with(Vec::new);
                    in_topics = !empty;
                }
            }
            b"JCharacteristicSet" => in_chars = !empty && current.is_some(),
            b"Topic" if in_topics => {
                let p = current.as_mut().expect("inside proposal");
                match a.get("name") {
                    Some(n) => p.topics.get_or_insert_with(Vec::new).push(n.clone()),
                    None => p.fail("Topic without name".into()),
                }
            }
            b"Characteristic" if in_chars => {
                let p = current.as_mut().expect("inside proposal");
                match parse_characteristic(&a) {
                    Ok((f, v)) => {
                        if p.characteristics.insert(f.clone(), v).is_some() {
                            p.fail(format!("duplicate feature `{f}`"));
                        }
                    }
                    Err(m) => p.fail(m),
                }
            }
            other => {
                if let Some(p) = current.as_mut() {
                    p.fail(format!(
                        "unexpected element <{}>",
                        String::from_utf8_lossy(other)
                    ));
                }
            }
        }
    }
    if !seen_root {
        return Err(fatal(src.len(), "document has no <JPD> root".into()));
    }
    Ok(out)
}

pub fn load_jpd(path: &Path) -> Result<XmlLoad> {
    let src = fs::read_to_string(path)?;
    parse_jpd(&src, path)
}

fn new_writer() -> Writer<Vec<u8>> {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("write to Vec");
    w
}

fn finish_writer(w: Writer<Vec<u8>>) -> String {
    let mut s = String::from_utf8(w.into_inner()).expect("writer emits utf-8");
    s.push('\n');
    s
}

fn empty_element(w: &mut Writer<Vec<u8>>, name: &str, attrs: &[(&str, &str)]) {
    let mut e = BytesStart::new(name);
    for &(k, v) in attrs {
        e.push_attribute((k, v));
    }
    w.write_event(Event::Empty(e)).expect("write to Vec");
}

/// Serializes proposals in the given order.
pub fn write_jpd<'a>(proposals: impl IntoIterator<Item = &'a JobProposal>) -> String {
    let mut w = new_writer();
    w.write_event(Event::Start(BytesStart::new("JPD"))).unwrap();
    for p in proposals {
        let mut start = BytesStart::new("JobProposal");
        start.push_attribute(("JID", p.jid.as_str()));
        start.push_attribute(("JURL", p.jurl.as_str()));
        w.write_event(Event::Start(start)).unwrap();

        w.write_event(Event::Start(BytesStart::new("JTopicSet"))).unwrap();
        for t in &p.topics {
            empty_element(&mut w, "Topic", &[("name", t.as_str())]);
        }
        w.write_event(Event::End(BytesEnd::new("JTopicSet"))).unwrap();

        if p.characteristics.is_empty() {
            empty_element(&mut w, "JCharacteristicSet", &[]);
        } else {
            w.write_event(Event::Start(BytesStart::new("JCharacteristicSet")))
                .unwrap();
            for (feature, value) in &p.characteristics {
                let (text, unit) = match value {
                    CharValue::Number { value, unit } => (value.to_string(), unit.as_deref()),
                    CharValue::Text(s) => (s.clone(), None),
                    CharValue::Set(items) => (join_set(items), None),
                };
                let mut a = vec![
                    ("feature", feature.as_str()),
                    ("type", value.type_name()),
                    ("value", text.as_str()),
                ];
                if let Some(u) = unit {
                    a.push(("unit", u));
                }
                empty_element(&mut w, "Characteristic", &a);
            }
            w.write_event(Event::End(BytesEnd::new("JCharacteristicSet")))
                .unwrap();
        }
        w.write_event(Event::End(BytesEnd::new("JobProposal"))).unwrap();
    }
    w.write_event(Event::End(BytesEnd::new("JPD"))).unwrap();
    finish_writer(w)
}

/// Formats a unit-interval value with at most 6 fractional digits.
pub fn format_unit(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn write_profile(profile: &UserProfile) -> String {
    let mut w = new_writer();
    let clock = profile.clock.to_string();
    let mut root = BytesStart::new("UserProfile");
    root.push_attribute(("uid", profile.uid.as_str()));
    root.push_attribute(("clock", clock.as_str()));
    w.write_event(Event::Start(root)).unwrap();
    for t in profile.topics.values() {
        let count = t.count.to_string();
        let stamp = t.first_time_stamp.to_string();
        empty_element(
            &mut w,
            "Topic",
            &[
                ("name", t.name.as_str()),
                ("count", &count),
                ("firstTimeStamp", &stamp),
            ],
        );
    }
    for c in &profile.constraints {
        let value = c.kind.value_text();
        empty_element(
            &mut w,
            "Constraint",
            &[
                ("feature", c.feature.as_str()),
                ("kind", c.kind.tag()),
                ("value", &value),
            ],
        );
    }
    for q in &profile.past_queries {
        let sigma = format_unit(q.sigma);
        let alpha = format_unit(q.alpha);
        empty_element(&mut w, "PastQuery", &[("sigma", &sigma), ("alpha", &alpha)]);
    }
    w.write_event(Event::End(BytesEnd::new("UserProfile"))).unwrap();
    finish_writer(w)
}

fn required<'a>(a: &'a HashMap<String, String>, key: &str, elem: &str) -> Result<&'a str> {
    a.get(key)
        .map(String::as_str)
        .ok_or_else(|| invalid(format!("<{elem}> is missing `{key}`")))
}

fn parse_num<T: std::str::FromStr>(raw: &str, what: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: `{raw}` is not a valid number")))
}

pub fn parse_profile(src: &str, origin: &Path) -> Result<UserProfile> {
    let mut reader = Reader::from_str(src);
    reader.config_mut().trim_text(true);
    let mut profile: Option<UserProfile> = None;

    loop {
        let pos = reader.buffer_position() as usize;
        let event = reader.read_event().map_err(|e| Error::XmlParse {
            path: origin.to_path_buf(),
            line: line_at(src, reader.error_position() as usize),
            message: e.to_string(),
        })?;
        let e = match event {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) => e,
            _ => continue,
        };
        let a = attrs(&e).map_err(|message| Error::XmlParse {
            path: origin.to_path_buf(),
            line: line_at(src, pos),
            message,
        })?;
        match (e.name().as_ref(), profile.as_mut()) {
            (b"UserProfile", None) => {
                let mut p = UserProfile::new(required(&a, "uid", "UserProfile")?);
                p.clock = match a.get("clock") {
                    Some(c) => parse_num(c, "clock")?,
                    None => 0,
                };
                profile = Some(p);
            }
            (b"Topic", Some(p)) => {
                let name = Topic::new(required(&a, "name", "Topic")?)?;
                let count = parse_num(required(&a, "count", "Topic")?, "count")?;
                let stamp: u64 =
                    parse_num(required(&a, "firstTimeStamp", "Topic")?, "firstTimeStamp")?;
                if stamp > p.clock {
                    return Err(invalid(format!(
                        "topic {name} stamped {stamp} after clock {}",
                        p.clock
                    )));
                }
                let t = ProfileTopic::new(name.clone(), count, stamp)?;
                p.topics.insert(name, t);
            }
            (b"Constraint", Some(p)) => {
                let kind = ConstraintKind::parse(
                    required(&a, "kind", "Constraint")?,
                    required(&a, "value", "Constraint")?,
                )?;
                p.set_constraint(Constraint::new(required(&a, "feature", "Constraint")?, kind)?);
            }
            (b"PastQuery", Some(p)) => {
                let sigma = parse_num(required(&a, "sigma", "PastQuery")?, "sigma")?;
                let alpha = parse_num(required(&a, "alpha", "PastQuery")?, "alpha")?;
                p.past_queries.push(PastQuery::new(sigma, alpha)?);
            }
            (name, _) => {
                return Err(invalid(format!(
                    "unexpected element <{}> in profile",
                    String::from_utf8_lossy(name)
                )))
            }
        }
    }
    profile.ok_or_else(|| invalid("document has no <UserProfile> root"))
}

pub fn load_profile(path: &Path) -> Result<UserProfile> {
    let src = fs::read_to_string(path)?;
    parse_profile(&src, path)
}

pub fn save_profile(profile: &UserProfile, path: &Path) -> Result<()> {
    fs::write(path, write_profile(profile))?;
    Ok(())
}
