use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind, ParseErrors, SourceSpan};
use crate::model::{
    MarkovModel, RateExpr, State, StateClass, StateId, Transition, TransitionKind,
};
use crate::validate::{validate, Subject};

/// Where each declaration came from, for attaching spans to validation findings.
#[derive(Debug, Default)]
struct SpanIndex {
    states: BTreeMap<StateId, SourceSpan>,
    transitions: Vec<SourceSpan>,
    init: BTreeMap<StateId, SourceSpan>,
    params: BTreeMap<String, SourceSpan>,
    document: Option<SourceSpan>,
}

impl SpanIndex {
    fn lookup(&self, subject: &Subject) -> SourceSpan {
        let fallback = self.document.unwrap_or(SourceSpan::new(1, 1, 0));
        match subject {
            Subject::Model => fallback,
            Subject::State(id) => self.states.get(id).copied().unwrap_or(fallback),
            Subject::Transition(i) => self.transitions.get(*i).copied().unwrap_or(fallback),
            Subject::Init(id) => self.init.get(id).copied().unwrap_or(fallback),
            Subject::Param(name) => self.params.get(name).copied().unwrap_or(fallback),
        }
    }
}

/// Parses a model and rejects any fatal validation finding, so the returned
/// model is ready for the solvers.
pub fn parse(text: &str) -> Result<MarkovModel, ParseErrors> {
    let (model, spans) = parse_with_spans(text)?;
    let report = validate(&model);
    let errors: Vec<ParseError> = report
        .fatal()
        .map(|f| {
            let mut msg = format!("{f}");
            if let Some(rest) = msg.strip_prefix("error: ") {
                msg = rest.into();
            }
            ParseError::new(ParseErrorKind::Semantic, spans.lookup(&f.subject), msg)
        })
        .collect();
    if errors.is_empty() {
        Ok(model)
    } else {
        Err(ParseErrors(errors))
    }
}

/// Parses without running [`validate`]; only lexical, syntactic and the
/// declaration-level semantic errors (duplicates, unknown init targets) are reported.
pub fn parse_unvalidated(text: &str) -> Result<MarkovModel, ParseErrors> {
    parse_with_spans(text).map(|(m, _)| m)
}

fn parse_with_spans(text: &str) -> Result<(MarkovModel, SpanIndex), ParseErrors> {
    let (tokens, lex_errors) = tokenize(text);
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: lex_errors,
        model: MarkovModel::default(),
        spans: SpanIndex::default(),
        init_seen: false,
    };
    p.document();
    p.finish()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    model: MarkovModel,
    spans: SpanIndex,
    init_seen: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(
            ParseErrorKind::Syntactic,
            t.span,
            format!("expected {expected}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek().tok == tok {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> PResult<SourceSpan> {
        match &self.peek().tok {
            Tok::Ident(s) if s == word => Ok(self.advance().span),
            _ => Err(self.unexpected(&format!("`{word}`"))),
        }
    }

    fn expect_name(&mut self) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.advance().span))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn expect_number(&mut self) -> PResult<f64> {
        match self.peek().tok {
            Tok::Number { value, .. } => {
                self.advance();
                Ok(value)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn expect_state_id(&mut self) -> PResult<(StateId, SourceSpan)> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Number { text, .. } if text.bytes().all(|b| b.is_ascii_digit()) => {
                match text.parse::<StateId>() {
                    Ok(id) if id > 0 => {
                        self.advance();
                        Ok((id, t.span))
                    }
                    _ => Err(ParseError::new(
                        ParseErrorKind::Syntactic,
                        t.span,
                        format!("state id `{text}` must be a positive 32-bit integer"),
                    )),
                }
            }
            _ => Err(self.unexpected("a state id")),
        }
    }

    fn skip_statement(&mut self) {
        loop {
            match self.advance().tok {
                Tok::Semi | Tok::Eof => return,
                _ => {}
            }
        }
    }

    fn semantic(&mut self, span: SourceSpan, message: String) {
        self.errors
            .push(ParseError::new(ParseErrorKind::Semantic, span, message));
    }

    fn document(&mut self) {
        self.spans.document = Some(self.peek().span);
        while self.peek().tok != Tok::Eof {
            if let Err(e) = self.statement() {
                self.errors.push(e);
                self.skip_statement();
            }
        }
    }

    fn statement(&mut self) -> PResult<()> {
        let (word, span) = match &self.peek().tok {
            Tok::Ident(w) => (w.clone(), self.peek().span),
            _ => return Err(self.unexpected("a statement keyword")),
        };
        match word.as_str() {
            "param" => self.param_stmt(span),
            "state" => self.state_stmt(span),
            "trans" => self.trans_stmt(span),
            "init" => self.init_stmt(span),
            "option" => self.option_stmt(span),
            _ => Err(self.unexpected("`param`, `state`, `trans`, `init` or `option`")),
        }
    }

    fn param_stmt(&mut self, kw: SourceSpan) -> PResult<()> {
        self.advance();
        let (name, name_span) = self.expect_name()?;
        self.expect(Tok::Eq)?;
        let value = self.expect_number()?;
        let coverage = if matches!(&self.peek().tok, Tok::Ident(w) if w == "coverage") {
            self.advance();
            true
        } else {
            false
        };
        self.expect(Tok::Semi)?;
        if self.model.params.contains(&name) {
            self.semantic(name_span, format!("duplicate parameter `{name}`"));
            return Ok(());
        }
        self.model.params.set(name.clone(), value);
        if coverage {
            self.model.coverage_params.insert(name.clone());
        }
        self.spans.params.insert(name, kw);
        Ok(())
    }

    fn state_stmt(&mut self, kw: SourceSpan) -> PResult<()> {
        self.advance();
        let (id, id_span) = self.expect_state_id()?;
        let label = match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                s
            }
            _ => return Err(self.unexpected("a quoted state label")),
        };
        self.expect_keyword("class")?;
        self.expect(Tok::Eq)?;
        let class = match &self.peek().tok {
            Tok::Ident(w) => StateClass::from_keyword(w),
            _ => None,
        }
        .ok_or_else(|| {
            self.unexpected("`operational`, `fail_operational`, `fail_safe` or `fail_unsafe`")
        })?;
        self.advance();
        self.expect(Tok::Semi)?;
        if self.spans.states.contains_key(&id) {
            self.semantic(id_span, format!("duplicate state id {id}"));
            return Ok(());
        }
        if label.is_empty() {
            self.semantic(id_span, format!("state {id} has an empty label"));
        }
        self.model.states.push(State::new(id, label, class));
        self.spans.states.insert(id, kw);
        Ok(())
    }

    fn trans_stmt(&mut self, kw: SourceSpan) -> PResult<()> {
        self.advance();
        let (from, _) = self.expect_state_id()?;
        self.expect(Tok::Arrow)?;
        let (to, _) = self.expect_state_id()?;
        self.expect_keyword("rate")?;
        self.expect(Tok::Eq)?;
        let rate = self.expr()?;
        let mut kind = TransitionKind::Failure;
        if matches!(&self.peek().tok, Tok::Ident(w) if w == "kind") {
            self.advance();
            self.expect(Tok::Eq)?;
            kind = match &self.peek().tok {
                Tok::Ident(w) if w == "failure" => TransitionKind::Failure,
                Tok::Ident(w) if w == "repair" => TransitionKind::Repair,
                _ => return Err(self.unexpected("`failure` or `repair`")),
            };
            self.advance();
        }
        self.expect(Tok::Semi)?;
        self.model.transitions.push(Transition {
            from,
            to,
            rate,
            kind,
        });
        self.spans.transitions.push(kw);
        Ok(())
    }

    fn init_stmt(&mut self, kw: SourceSpan) -> PResult<()> {
        self.advance();
        let (id, id_span) = self.expect_state_id()?;
        self.expect(Tok::Eq)?;
        let value = self.expect_number()?;
        self.expect(Tok::Semi)?;
        self.init_seen = true;
        if self.model.initial.contains_key(&id) {
            self.semantic(id_span, format!("duplicate init for state {id}"));
            return Ok(());
        }
        self.model.initial.insert(id, value);
        self.spans.init.insert(id, kw);
        Ok(())
    }

    fn option_stmt(&mut self, _kw: SourceSpan) -> PResult<()> {
        self.advance();
        let (name, name_span) = self.expect_name()?;
        self.expect(Tok::Eq)?;
        let value = self.expect_number()?;
        self.expect(Tok::Semi)?;
        match name.as_str() {
            "horizon" => {
                if self.model.horizon.is_some() {
                    self.semantic(name_span, "duplicate option `horizon`".into());
                }
                self.model.horizon = Some(value);
            }
            _ => self.semantic(name_span, format!("unknown option `{name}`")),
        }
        Ok(())
    }

    fn expr(&mut self) -> PResult<RateExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    lhs = RateExpr::sum(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    lhs = RateExpr::difference(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<RateExpr> {
        let mut lhs = self.factor()?;
        while self.peek().tok == Tok::Star {
            self.advance();
            lhs = RateExpr::product(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<RateExpr> {
        match &self.peek().tok {
            Tok::Number { value, .. } => {
                let v = *value;
                self.advance();
                Ok(RateExpr::Constant(v))
            }
            Tok::Ident(name) => {
                let name = name.clone();
                self.advance();
                Ok(RateExpr::Param(name))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("a number, parameter name or `(`")),
        }
    }

    fn finish(mut self) -> Result<(MarkovModel, SpanIndex), ParseErrors> {
        let init_spans: Vec<(StateId, SourceSpan)> =
            self.spans.init.iter().map(|(k, v)| (*k, *v)).collect();
        for (id, span) in init_spans {
            if !self.spans.states.contains_key(&id) {
                self.semantic(span, format!("init references unknown state {id}"));
            }
        }
        // A document with syntax errors is incomplete; skip the default-init check.
        if !self.init_seen && self.errors.is_empty() {
            let first_up = self
                .model
                .states
                .iter()
                .filter(|s| s.class == StateClass::Operational)
                .map(|s| s.id)
                .min();
            match first_up {
                Some(id) => {
                    self.model.initial.insert(id, 1.0);
                }
                None => {
                    let span = self.spans.document.unwrap_or(SourceSpan::new(1, 1, 0));
                    self.semantic(
                        span,
                        "no `init` statement and no operational state to start in".into(),
                    );
                }
            }
        }
        if !self.errors.is_empty() {
            self.errors
                .sort_by_key(|e| (e.span.line, e.span.column));
            return Err(ParseErrors(self.errors));
        }

        // Canonical order: states by id, transitions stably by (from, to).
        let mut model = self.model;
        let mut spans = self.spans;
        model.states.sort_by_key(|s| s.id);
        let mut order: Vec<usize> = (0..model.transitions.len()).collect();
        order.sort_by_key(|&i| (model.transitions[i].from, model.transitions[i].to));
        let transitions = order.iter().map(|&i| model.transitions[i].clone()).collect();
        spans.transitions = order.iter().map(|&i| spans.transitions[i]).collect();
        model.transitions = transitions;
        Ok((model, spans))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "param L = 0.5; state 1 \"up\" class=operational; \
                           state 2 \"down\" class=fail_safe; trans 1 -> 2 rate = L;";

    #[test]
    fn minimal_model() {
        let m = parse(MINIMAL).unwrap();
        assert_eq!(m.states.len(), 2);
        assert_eq!(m.transitions.len(), 1);
        assert_eq!(m.initial.get(&1), Some(&1.0));
        assert_eq!(m.initial.len(), 1);
        assert_eq!(m.params.get("L"), Some(0.5));
    }

    #[test]
    fn truncated_transition() {
        let errs = parse("trans 1 -> ;").unwrap_err().0;
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseErrorKind::Syntactic);
        assert_eq!(errs[0].span.line, 1);
        assert!(errs[0].message.contains("`;`"), "{}", errs[0].message);
    }

    #[test]
    fn precedence() {
        let m = parse(
            "param A = 2; param B = 3; param C = 0.5 coverage;\
             state 1 \"a\" class = operational; state 2 \"b\" class = fail_unsafe;\
             trans 1 -> 2 rate = A + B * (1 - C) kind = failure;",
        )
        .unwrap();
        let v = m.transitions[0].rate.eval(&m.params).unwrap();
        assert_eq!(v, 3.5);
        assert!(m.coverage_params.contains("C"));
    }

    #[test]
    fn duplicate_state_and_param() {
        let errs = parse(
            "param A = 1; param A = 2;\nstate 1 \"a\" class = operational;\nstate 1 \"b\" class = fail_safe;",
        )
        .unwrap_err()
        .0;
        assert_eq!(errs.len(), 2);
        assert!(errs.iter().all(|e| e.kind == ParseErrorKind::Semantic));
        assert_eq!(errs[1].span.line, 3);
    }

    #[test]
    fn init_unknown_state() {
        let errs = parse("state 1 \"a\" class = operational;\ninit 4 = 1;")
            .unwrap_err()
            .0;
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseErrorKind::Semantic);
        assert_eq!(errs[0].span.line, 2);
    }

    #[test]
    fn validation_findings_become_semantic_errors() {
        let text = "state 1 \"a\" class = operational;\nstate 2 \"b\" class = fail_safe;\n\
                    trans 1 -> 9 rate = 1;\ninit 1 = 0.8;";
        let errs = parse(text).unwrap_err().0;
        assert!(errs.iter().any(|e| e.span.line == 3 && e.message.contains("dangling")));
        assert!(errs.iter().any(|e| e.message.contains("sum defect")));
        let raw = parse_unvalidated(text).unwrap();
        assert_eq!(raw.transitions.len(), 1);
    }

    #[test]
    fn recovers_after_error() {
        let errs = parse("param = 1;\nstate x;\nparam B = 2; state 2 \"s\" class = operational;")
            .unwrap_err()
            .0;
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].span.line, 1);
        assert_eq!(errs[1].span.line, 2);
    }

    #[test]
    fn no_operational_state_without_init() {
        let errs = parse("state 1 \"a\" class = fail_safe;").unwrap_err().0;
        assert_eq!(errs[0].kind, ParseErrorKind::Semantic);
    }

    #[test]
    fn horizon_option() {
        let m = parse("state 1 \"a\" class = operational; option horizon = 4000;").unwrap();
        assert_eq!(m.horizon, Some(4000.0));
        assert!(parse("state 1 \"a\" class = operational; option speed = 1;").is_err());
    }
}
