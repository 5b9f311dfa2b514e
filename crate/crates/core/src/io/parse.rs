//! Line-oriented text formats for nets, relations and marking expressions.
//!
//! ```text
//! net <name>
//! place <id> [<id> ...]
//! trans <id> : <mexpr> -> <label> -> <mexpr-or-0>
//! marking <name> = <mexpr-or-0>
//!
//! relation <name>
//! pair <lhs> <rhs>        # either side may be 0 for θ
//! ```

use std::fmt;

use thiserror::Error;

use crate::net::{Label, Marking, Net, NetBuilder, PlaceId};
use crate::relations::{PlaceOrTheta, PlaceRelation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Colon,
    Arrow,
    Plus,
    Star,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn lex(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let code = line.split('#').next().unwrap_or("");
    let chars: Vec<char> = code.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| ParseError { line: lineno, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            _ if c.is_whitespace() => i += 1,
            ':' => {
                out.push((Tok::Colon, col));
                i += 1
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1
            }
            '=' => {
                out.push((Tok::Eq, col));
                i += 1
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, col));
                i += 2
            }
            '-' if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                return Err(err(col, "negative multiplicity".into()));
            }
            _ if c.is_ascii_digit() && !chars[i..].iter().take_while(|c| is_ident_char(**c)).any(|c| !c.is_ascii_digit()) => {
                let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                i += s.len();
                let n = s.parse::<u64>().map_err(|_| err(col, format!("number `{s}` too large")))?;
                out.push((Tok::Num(n), col));
            }
            _ if is_ident_char(c) => {
                // `-` may appear inside a name unless it starts an arrow
                let start = i;
                while i < chars.len()
                    && (is_ident_char(chars[i]) || (chars[i] == '-' && chars.get(i + 1).is_some_and(|d| is_ident_char(*d))))
                {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            _ => return Err(err(col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        let col = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col);
        ParseError { line: self.line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.0);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want} at end of line"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what} at end of line"))),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected {t}"))),
        }
    }
}

// <mexpr> with `0` for θ when `allow_theta` holds.
fn mexpr(cur: &mut Cursor, lookup: &dyn Fn(&str) -> Option<PlaceId>, allow_theta: bool) -> Result<Marking, ParseError> {
    if cur.peek() == Some(&Tok::Num(0)) && cur.toks.get(cur.pos + 1).map(|t| &t.0) != Some(&Tok::Star) {
        if !allow_theta {
            return Err(cur.err("θ (`0`) is not allowed here"));
        }
        cur.pos += 1;
        return Ok(Marking::empty());
    }
    let mut counts: Vec<(PlaceId, u32)> = Vec::new();
    loop {
        let k = match cur.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                if n == 0 {
                    return Err(cur.err("zero multiplicity"));
                }
                let n = u32::try_from(n).map_err(|_| cur.err("multiplicity too large"))?;
                cur.pos += 1;
                cur.expect(Tok::Star)?;
                n
            }
            _ => 1,
        };
        let name = cur.ident("a place")?;
        let p = lookup(&name).ok_or_else(|| {
            cur.pos -= 1;
            let e = cur.err(format!("undeclared place `{name}`"));
            cur.pos += 1;
            e
        })?;
        counts.push((p, k));
        if cur.peek() == Some(&Tok::Plus) {
            cur.pos += 1;
        } else {
            break;
        }
    }
    Marking::from_counts(counts).map_err(|e| cur.err(e.to_string()))
}

fn cursor<'a>(toks: &'a [(Tok, usize)], line: usize, text: &str) -> Cursor<'a> {
    Cursor { toks, pos: 0, line, end_col: text.chars().count() + 1 }
}

/// Parses the net text format.
pub fn parse_net(text: &str) -> Result<Net, ParseError> {
    let mut builder: Option<NetBuilder> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let toks = lex(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = cursor(&toks, lineno, raw);
        let kw = cur.ident("a keyword")?;
        let b = match (&mut builder, kw.as_str()) {
            (None, "net") => {
                let name = cur.ident("a net name")?;
                cur.done()?;
                builder = Some(NetBuilder::new(name));
                continue;
            }
            (None, _) => {
                cur.pos = 0;
                return Err(cur.err("expected `net <name>` first"));
            }
            (Some(_), "net") => {
                cur.pos = 0;
                return Err(cur.err("duplicate `net` line"));
            }
            (Some(b), _) => b,
        };
        match kw.as_str() {
            "place" => {
                if cur.peek().is_none() {
                    return Err(cur.err("expected at least one place"));
                }
                while cur.peek().is_some() {
                    let name = cur.ident("a place name")?;
                    if b.lookup(&name).is_some() {
                        cur.pos -= 1;
                        return Err(cur.err(format!("duplicate place `{name}`")));
                    }
                    b.place(name);
                }
            }
            "trans" => {
                let name = cur.ident("a transition name")?;
                cur.expect(Tok::Colon)?;
                let pre = mexpr(&mut cur, &|n| b.lookup(n), false)?;
                cur.expect(Tok::Arrow)?;
                let label = cur.ident("a label")?;
                cur.expect(Tok::Arrow)?;
                let post = mexpr(&mut cur, &|n| b.lookup(n), true)?;
                cur.done()?;
                b.transition(name, pre, Label::parse(&label), post);
            }
            "marking" => {
                let name = cur.ident("a marking name")?;
                cur.expect(Tok::Eq)?;
                let m = mexpr(&mut cur, &|n| b.lookup(n), true)?;
                cur.done()?;
                b.marking(name, m);
            }
            other => {
                cur.pos = 0;
                return Err(cur.err(format!("unknown keyword `{other}`")));
            }
        }
    }
    let b = builder.ok_or(ParseError { line: last_line.max(1), col: 1, msg: "missing `net <name>` line".into() })?;
    b.build().map_err(|e| ParseError { line: last_line.max(1), col: 1, msg: e.to_string() })
}

/// Parses a marking expression such as `s1+2*s2`, or `0` for θ. A name of
/// a marking declared in the net file is accepted too.
pub fn parse_marking(expr: &str, net: &Net) -> Result<Marking, ParseError> {
    let toks = lex(expr, 1)?;
    if let [(Tok::Ident(name), _)] = toks.as_slice() {
        if net.place(name).is_none() {
            if let Some(m) = net.named_markings().get(name) {
                return Ok(m.clone());
            }
        }
    }
    let mut cur = cursor(&toks, 1, expr);
    if cur.peek().is_none() {
        return Err(cur.err("empty marking expression"));
    }
    let m = mexpr(&mut cur, &|n| net.place(n), true)?;
    cur.done()?;
    Ok(m)
}

/// Parses the relation text format against the places of `net`.
pub fn parse_relation(text: &str, net: &Net) -> Result<PlaceRelation, ParseError> {
    let mut rel = PlaceRelation::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = lex(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = cursor(&toks, lineno, raw);
        let kw = cur.ident("a keyword")?;
        match (header, kw.as_str()) {
            (false, "relation") => {
                cur.ident("a relation name")?;
                cur.done()?;
                header = true;
            }
            (false, _) => {
                cur.pos = 0;
                return Err(cur.err("expected `relation <name>` first"));
            }
            (true, "pair") => {
                let mut side = || -> Result<PlaceOrTheta, ParseError> {
                    match cur.next() {
                        Some(Tok::Num(0)) => Ok(PlaceOrTheta::Theta),
                        Some(Tok::Ident(n)) => net.place(n.as_str()).map(PlaceOrTheta::Place).ok_or_else(|| {
                            cur.pos -= 1;
                            cur.err(format!("undeclared place `{n}`"))
                        }),
                        Some(t) => {
                            cur.pos -= 1;
                            Err(cur.err(format!("expected a place or 0, found {t}")))
                        }
                        None => Err(cur.err("expected a place or 0 at end of line")),
                    }
                };
                let a = side()?;
                let b = side()?;
                cur.done()?;
                rel.insert(a, b).map_err(|e| ParseError { line: lineno, col: 1, msg: e.to_string() })?;
            }
            (true, other) => {
                cur.pos = 0;
                return Err(cur.err(format!("unknown keyword `{other}`")));
            }
        }
    }
    if !header {
        return Err(ParseError { line: 1, col: 1, msg: "missing `relation <name>` line".into() });
    }
    Ok(rel)
}

/// Renders a net in the text format; parsing the result gives the same net.
pub fn write_net(net: &Net) -> String {
    let mut s = format!("net {}\n", net.name());
    let names: Vec<&str> = net.places().map(|p| net.place_name(p)).collect();
    if !names.is_empty() {
        s.push_str(&format!("place {}\n", names.join(" ")));
    }
    for t in net.transitions() {
        s.push_str(&format!(
            "trans {} : {} -> {} -> {}\n",
            t.name,
            net.format_marking(&t.pre),
            t.label,
            net.format_marking(&t.post)
        ));
    }
    for (name, m) in net.named_markings() {
        s.push_str(&format!("marking {name} = {}\n", net.format_marking(m)));
    }
    s
}

pub fn write_relation(net: &Net, rel: &PlaceRelation, name: &str) -> String {
    let mut s = format!("relation {name}\n");
    for (a, b) in rel.pairs() {
        s.push_str(&format!("pair {} {}\n", a.display(net), b.display(net)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const NET: &str = "\
net demo   # comment
place s1 s2
place P1'
trans t1 : s1 + 2*s2 -> a -> 0
trans t2 : P1' -> tau -> s1
marking m0 = s1 + 2*s2
";

    #[test]
    fn parses_the_format() {
        let net = parse_net(NET).unwrap();
        assert_eq!(net.place_count(), 3);
        assert_eq!(parse_net("net cn-vs-icn\n").unwrap().name(), "cn-vs-icn");
        let t1 = net.transition_by_name("t1").unwrap();
        assert_eq!(t1.pre.size(), 3);
        assert!(t1.post.is_empty());
        assert!(net.transition_by_name("t2").unwrap().label.is_tau());
        let m0 = &net.named_markings()["m0"];
        assert_eq!(m0.count(net.place("s2").unwrap()), 2);
        assert_eq!(parse_marking("s1+2*s2", &net).unwrap(), *m0);
        assert_eq!(parse_marking("m0", &net).unwrap(), *m0);
        assert_eq!(parse_marking("0", &net).unwrap(), Marking::empty());
    }

    #[test]
    fn round_trips() {
        let net = parse_net(NET).unwrap();
        let again = parse_net(&write_net(&net)).unwrap();
        assert_eq!(write_net(&again), write_net(&net));
    }

    #[test]
    fn diagnostics() {
        let e = parse_net("net x\nplace s1\ntrans t1 : s1, \n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 14));
        let e = parse_net("net x\nplace s1\ntrans t1 : 0 -> a -> s1\n").unwrap_err();
        assert!(e.msg.contains("not allowed"));
        let e = parse_net("net x\nplace s1\ntrans t1 : s9 -> a -> s1\n").unwrap_err();
        assert!(e.msg.contains("undeclared"));
        assert_eq!(e.col, 12);
        let e = parse_net("net x\nplace s1\ntrans t1 : 0*s1 -> a -> s1\n").unwrap_err();
        assert!(e.msg.contains("zero"));
        let e = parse_net("net x\nplace s1\nmarking m = -2*s1\n").unwrap_err();
        assert!(e.msg.contains("negative"));
        let e = parse_net("place s1\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn relation_format() {
        let net = parse_net("net x\nplace s1 s5\n").unwrap();
        let r = parse_relation("relation r\npair s1 s5\npair 0 s5 # d\n", &net).unwrap();
        assert!(r.contains(PlaceOrTheta::Theta, PlaceOrTheta::Place(net.place("s5").unwrap())));
        assert_eq!(r.len(), 2);
        assert!(parse_relation("relation r\npair 0 0\n", &net).is_err());
        assert!(parse_relation("pair s1 s5\n", &net).is_err());
        let e = parse_relation("relation r\npair s1 s7\n", &net).unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));
        assert_eq!(parse_relation(&write_relation(&net, &r, "r"), &net).unwrap(), r);
    }
}
