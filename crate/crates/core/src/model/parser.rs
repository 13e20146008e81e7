//! Declaration-level recursive-descent parser.
//!
//! Only structure is parsed: type headers, fields and method signatures.
//! Method bodies are delimited by brace matching and handed to the token
//! scanner in [`super::body`].

use std::collections::BTreeSet;

use super::body;
use super::lexer::{tokenize, Token, TokenKind};
use super::{canonical_key, ClassModel, FieldModel, MethodModel, ParseError, SourceUnit, TypeKind, Visibility};

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default", "sealed",
];

#[derive(Debug, Default, Clone)]
struct Modifiers {
    visibility: Option<Visibility>,
    is_static: bool,
    is_final: bool,
    is_abstract: bool,
    is_override: bool,
}

/// Members collected from a type body, including folded nested types.
#[derive(Debug, Default)]
struct Members {
    fields: Vec<FieldModel>,
    methods: Vec<PendingMethod>,
}

#[derive(Debug)]
struct PendingMethod {
    model: MethodModel,
    params: BTreeSet<String>,
    facts: body::BodyFacts,
}

struct Declaration {
    name: String,
    kind: TypeKind,
    is_abstract: bool,
    extends_name: Option<String>,
    implements_names: Vec<String>,
    members: Members,
    start: usize,
    end: usize,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    /// Sorted, de-duplicated lines that carry at least one token.
    lines: Vec<u32>,
}

/// Parses one Java file. `path` is project-relative and determines the
/// canonical keys of the types found.
pub fn parse_source(text: &str, path: &str) -> Result<SourceUnit, ParseError> {
    let file_key = canonical_key(path).map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    let tokens = tokenize(text)?;
    let mut lines: Vec<u32> = tokens.iter().map(|t| t.line).collect();
    lines.dedup();
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        lines,
    };
    let stem = file_key.rsplit('.').next().unwrap_or(&file_key).to_string();

    let mut types: Vec<ClassModel> = Vec::new();
    while !p.at_end() {
        if p.peek_is(";") {
            p.pos += 1;
            continue;
        }
        if p.peek_word("package") || p.peek_word("import") {
            p.skip_past(";")?;
            continue;
        }
        let start = p.pos;
        let mods = p.modifiers()?;
        let decl = p.type_declaration(mods, start)?;
        let mut class = p.finish(decl);
        if types.iter().any(|t| t.name == class.name) {
            let tok = &tokens[start];
            return Err(ParseError::new(tok.line, tok.col, format!("duplicate type {}", class.name)));
        }
        class.canonical_key = if class.name == stem {
            file_key.clone()
        } else {
            format!("{file_key}${}", class.name)
        };
        types.push(class);
    }
    Ok(SourceUnit {
        path: path.to_string(),
        types,
    })
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + offset)
    }

    fn peek_is(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is(p))
    }

    fn peek_word(&self, w: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(w))
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        match self.peek().or(self.tokens.last()) {
            Some(t) => ParseError::new(t.line, t.col, msg),
            None => ParseError::new(1, 1, msg),
        }
    }

    fn next(&mut self) -> Result<&'a Token, ParseError> {
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| self.error_here("unexpected end of file"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, p: &str) -> Result<(), ParseError> {
        if self.peek_is(p) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.peek().map(|t| t.text.clone()).unwrap_or_else(|| "end of file".into());
            Err(self.error_here(format!("expected '{p}', found '{found}'")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            Some(t) => Err(self.error_here(format!("expected identifier, found '{}'", t.text))),
            None => Err(self.error_here("expected identifier, found end of file")),
        }
    }

    fn skip_past(&mut self, p: &str) -> Result<(), ParseError> {
        while !self.peek_is(p) {
            self.next()?;
        }
        self.pos += 1;
        Ok(())
    }

    /// Skips a balanced group starting at the current opening token and
    /// returns the index of its closing token.
    fn skip_group(&mut self, open: &str, close: &str) -> Result<usize, ParseError> {
        let opener = self.peek().ok_or_else(|| self.error_here("unexpected end of file"))?;
        self.expect(open)?;
        let mut depth = 1usize;
        loop {
            let tok = self
                .tokens
                .get(self.pos)
                .ok_or_else(|| ParseError::new(opener.line, opener.col, format!("unclosed '{open}'")))?;
            self.pos += 1;
            if tok.is(open) {
                depth += 1;
            } else if tok.is(close) {
                depth -= 1;
                if depth == 0 {
                    return Ok(self.pos - 1);
                }
            }
        }
    }

    fn loc_between(&self, first: usize, last: usize) -> usize {
        let (a, b) = (self.tokens[first].line, self.tokens[last].line);
        let lo = self.lines.partition_point(|l| *l < a);
        let hi = self.lines.partition_point(|l| *l <= b);
        hi - lo
    }

    fn annotation(&mut self) -> Result<String, ParseError> {
        self.expect("@")?;
        let mut name = self.ident()?;
        while self.peek_is(".") && self.peek_at(1).is_some_and(|t| t.is_ident()) {
            self.pos += 1;
            name = self.ident()?;
        }
        if self.peek_is("(") {
            self.skip_group("(", ")")?;
        }
        Ok(name)
    }

    fn modifiers(&mut self) -> Result<Modifiers, ParseError> {
        let mut m = Modifiers::default();
        while let Some(tok) = self.peek() {
            if tok.is("@") && !self.peek_at(1).is_some_and(|t| t.is_word("interface")) {
                if self.annotation()? == "Override" {
                    m.is_override = true;
                }
                continue;
            }
            if tok.is_word("non")
                && self.peek_at(1).is_some_and(|t| t.is("-"))
                && self.peek_at(2).is_some_and(|t| t.is_word("sealed"))
            {
                self.pos += 3;
                continue;
            }
            if tok.kind != TokenKind::Ident || !MODIFIERS.contains(&tok.text.as_str()) {
                break;
            }
            match tok.text.as_str() {
                "public" => m.visibility = Some(Visibility::Public),
                "protected" => m.visibility = Some(Visibility::Protected),
                "private" => m.visibility = Some(Visibility::Private),
                "static" => m.is_static = true,
                "final" => m.is_final = true,
                "abstract" => m.is_abstract = true,
                _ => {}
            }
            self.pos += 1;
        }
        Ok(m)
    }

    /// Parses a type reference and returns its dotted name without type
    /// arguments or array dimensions.
    fn type_ref(&mut self) -> Result<String, ParseError> {
        while self.peek_is("@") {
            self.annotation()?;
        }
        let mut name = self.ident()?;
        loop {
            if self.peek_is("<") {
                self.skip_group("<", ">")?;
            } else if self.peek_is(".") && self.peek_at(1).is_some_and(|t| t.is_ident()) {
                self.pos += 1;
                name.push('.');
                name.push_str(&self.ident()?);
            } else if self.peek_is(".") && self.peek_at(1).is_some_and(|t| t.is("@")) {
                self.pos += 1;
                self.annotation()?;
            } else {
                break;
            }
        }
        while self.peek_is("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
            name.push_str("[]");
        }
        if self.peek_is("...") {
            self.pos += 1;
            name.push_str("[]");
        }
        Ok(name)
    }

    fn type_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut names = vec![self.type_ref()?];
        while self.peek_is(",") {
            self.pos += 1;
            names.push(self.type_ref()?);
        }
        Ok(names)
    }

    fn type_declaration(&mut self, mods: Modifiers, start: usize) -> Result<Declaration, ParseError> {
        let (kind, is_record) = match self.next()? {
            t if t.is_word("class") => (TypeKind::Class, false),
            t if t.is_word("interface") => (TypeKind::Interface, false),
            t if t.is_word("enum") => (TypeKind::Enum, false),
            t if t.is_word("record") => (TypeKind::Class, true),
            t if t.is("@") => {
                if !self.peek_word("interface") {
                    return Err(self.error_here("expected 'interface' after '@'"));
                }
                self.pos += 1;
                (TypeKind::Interface, false)
            }
            t => {
                self.pos -= 1;
                return Err(self.error_here(format!("expected type declaration, found '{}'", t.text)));
            }
        };
        let name = self.ident()?;
        if self.peek_is("<") {
            self.skip_group("<", ">")?;
        }

        let mut members = Members::default();
        if is_record {
            let comps = self.parameters()?;
            for (type_name, comp) in comps {
                members.fields.push(FieldModel {
                    name: comp,
                    visibility: Visibility::Private,
                    is_static: false,
                    is_final: true,
                    type_name,
                    has_getter: false,
                    has_setter: false,
                });
            }
        }

        let mut extends_name = None;
        let mut implements_names = Vec::new();
        loop {
            if self.peek_word("extends") {
                self.pos += 1;
                let list = self.type_list()?;
                if kind == TypeKind::Interface {
                    implements_names.extend(list);
                } else {
                    extends_name = list.into_iter().next();
                }
            } else if self.peek_word("implements") {
                self.pos += 1;
                implements_names.extend(self.type_list()?);
            } else if self.peek_word("permits") {
                self.pos += 1;
                self.type_list()?;
            } else {
                break;
            }
        }

        let end = self.type_body(&name, kind, &mut members)?;
        Ok(Declaration {
            name,
            kind,
            is_abstract: mods.is_abstract || kind == TypeKind::Interface,
            extends_name,
            implements_names,
            members,
            start,
            end,
        })
    }

    /// Resolves field touches against the complete (folded) field set.
    fn finish(&self, decl: Declaration) -> ClassModel {
        let Declaration {
            name,
            kind,
            is_abstract,
            extends_name,
            implements_names,
            members,
            start,
            end,
        } = decl;
        let referenced_names = self.tokens[start..=end]
            .iter()
            .filter(|t| t.is_ident() && t.text != name)
            .map(|t| t.text.clone())
            .collect();

        let field_names: BTreeSet<&str> = members.fields.iter().map(|f| f.name.as_str()).collect();
        let mut methods = Vec::with_capacity(members.methods.len());
        for pending in members.methods {
            let PendingMethod {
                mut model,
                params,
                facts,
            } = pending;
            let own_field = |n: &String| {
                field_names.contains(n.as_str()) && !params.contains(n) && !facts.locals.contains(n)
            };
            let via_this = |n: &String| facts.this_fields.contains(n) && field_names.contains(n.as_str());
            model.reads_fields = facts.used.iter().filter(|n| own_field(n) || via_this(n)).cloned().collect();
            model.writes_fields = facts
                .written
                .iter()
                .filter(|n| own_field(n) || via_this(n))
                .cloned()
                .collect();
            methods.push(model);
        }

        let mut fields = members.fields;
        for field in &mut fields {
            let prop = lower_first(&field.name);
            field.has_getter = methods
                .iter()
                .any(|m| m.is_getter() && m.accessed_property().as_deref() == Some(prop.as_str()));
            field.has_setter = methods
                .iter()
                .any(|m| m.is_setter() && m.accessed_property().as_deref() == Some(prop.as_str()));
        }

        ClassModel {
            name,
            canonical_key: String::new(),
            kind,
            is_abstract,
            extends_name,
            implements_names,
            fields,
            methods,
            loc: self.loc_between(start, end).max(1),
            referenced_names,
        }
    }

    /// Parses `{ members }` and returns the index of the closing brace.
    fn type_body(&mut self, class_name: &str, kind: TypeKind, members: &mut Members) -> Result<usize, ParseError> {
        self.expect("{")?;
        if kind == TypeKind::Enum {
            self.enum_constants(class_name, members)?;
        }
        loop {
            let Some(tok) = self.peek() else {
                return Err(self.error_here("unclosed type body"));
            };
            if tok.is("}") {
                self.pos += 1;
                return Ok(self.pos - 1);
            }
            if tok.is(";") {
                self.pos += 1;
                continue;
            }
            if tok.is("{") {
                self.skip_group("{", "}")?;
                continue;
            }
            if tok.is_word("static") && self.peek_at(1).is_some_and(|t| t.is("{")) {
                self.pos += 1;
                self.skip_group("{", "}")?;
                continue;
            }
            self.member(class_name, kind, members)?;
        }
    }

    fn enum_constants(&mut self, enum_name: &str, members: &mut Members) -> Result<(), ParseError> {
        loop {
            while self.peek_is("@") {
                self.annotation()?;
            }
            if self.peek_is(";") {
                self.pos += 1;
                return Ok(());
            }
            if self.peek_is("}") {
                return Ok(());
            }
            let name = self.ident()?;
            if self.peek_is("(") {
                self.skip_group("(", ")")?;
            }
            if self.peek_is("{") {
                // constant-specific class body, folded like any nested type
                self.type_body(enum_name, TypeKind::Class, members)?;
            }
            members.fields.push(FieldModel {
                name,
                visibility: Visibility::Public,
                is_static: true,
                is_final: true,
                type_name: enum_name.to_string(),
                has_getter: false,
                has_setter: false,
            });
            if self.peek_is(",") {
                self.pos += 1;
            } else if self.peek_is(";") {
                self.pos += 1;
                return Ok(());
            } else if self.peek_is("}") {
                return Ok(());
            } else {
                return Err(self.error_here("expected ',', ';' or '}' after enum constant"));
            }
        }
    }

    fn member(&mut self, class_name: &str, kind: TypeKind, members: &mut Members) -> Result<(), ParseError> {
        let start = self.pos;
        let mods = self.modifiers()?;
        let is_type_decl = self.peek_word("class")
            || self.peek_word("interface")
            || self.peek_word("enum")
            || (self.peek_is("@") && self.peek_at(1).is_some_and(|t| t.is_word("interface")))
            || (self.peek_word("record")
                && self.peek_at(1).is_some_and(|t| t.is_ident())
                && self.peek_at(2).is_some_and(|t| t.is("(") || t.is("<")));
        if is_type_decl {
            let nested = self.type_declaration(mods, start)?;
            members.fields.extend(nested.members.fields);
            members.methods.extend(nested.members.methods);
            return Ok(());
        }

        if self.peek_is("<") {
            self.skip_group("<", ">")?;
        }

        let visibility = mods.visibility.unwrap_or(if kind == TypeKind::Interface {
            Visibility::Public
        } else {
            Visibility::Package
        });

        // Constructor: `Name(`; compact record constructor: `Name {`.
        let is_ctor = self.peek().is_some_and(|t| t.is_ident())
            && self.peek_at(1).is_some_and(|t| t.is("("))
            && self.peek().is_some_and(|t| t.text == class_name);
        let is_compact_ctor = self.peek().is_some_and(|t| t.text == class_name)
            && self.peek_at(1).is_some_and(|t| t.is("{"));
        if is_compact_ctor {
            self.pos += 1;
            let (open, close) = self.block()?;
            let facts = body::analyze(&self.tokens[open + 1..close]);
            members.methods.push(self.pending_method(
                class_name.to_string(),
                Vec::new(),
                None,
                &mods,
                visibility,
                true,
                start,
                close,
                facts,
            ));
            return Ok(());
        }

        let return_type = if is_ctor { None } else { Some(self.type_ref()?) };
        let name = self.ident()?;

        if self.peek_is("(") {
            let params = self.parameters()?;
            while self.peek_is("[") {
                self.skip_group("[", "]")?;
            }
            if self.peek_word("throws") {
                self.pos += 1;
                self.type_list()?;
            }
            let (end, facts, has_body) = if self.peek_is("{") {
                let (open, close) = self.block()?;
                (close, body::analyze(&self.tokens[open + 1..close]), true)
            } else {
                if self.peek_word("default") {
                    // annotation element default value
                    while !self.peek_is(";") {
                        if self.peek_is("{") {
                            self.skip_group("{", "}")?;
                        } else if self.peek_is("(") {
                            self.skip_group("(", ")")?;
                        } else {
                            self.next()?;
                        }
                    }
                }
                self.expect(";")?;
                (self.pos - 1, body::analyze(&[]), false)
            };
            let mut method_mods = mods.clone();
            if !has_body && !mods.is_static {
                method_mods.is_abstract = true;
            }
            members.methods.push(self.pending_method(
                name,
                params,
                return_type,
                &method_mods,
                visibility,
                is_ctor,
                start,
                end,
                facts,
            ));
            return Ok(());
        }

        if is_ctor {
            return Err(self.error_here("malformed constructor"));
        }
        let type_name = return_type.unwrap_or_default();
        let (is_static, is_final) = if kind == TypeKind::Interface {
            (true, true)
        } else {
            (mods.is_static, mods.is_final)
        };
        let mut push_field = |name: String| {
            members.fields.push(FieldModel {
                name,
                visibility,
                is_static,
                is_final,
                type_name: type_name.clone(),
                has_getter: false,
                has_setter: false,
            })
        };
        push_field(name);
        loop {
            while self.peek_is("[") {
                self.skip_group("[", "]")?;
            }
            if self.peek_is("=") {
                self.pos += 1;
                self.initializer()?;
            }
            if self.peek_is(";") {
                self.pos += 1;
                return Ok(());
            }
            if self.peek_is(",") {
                self.pos += 1;
                push_field(self.ident()?);
                continue;
            }
            return Err(self.error_here("expected ';' after field declaration"));
        }
    }

    /// Skips a field initializer up to the `,` that starts another
    /// declarator or the terminating `;`.
    fn initializer(&mut self) -> Result<(), ParseError> {
        loop {
            let tok = self.peek().ok_or_else(|| self.error_here("unterminated field initializer"))?;
            if tok.is(";") {
                return Ok(());
            }
            if tok.is(",") {
                let starts_declarator = self.peek_at(1).is_some_and(|t| t.is_ident())
                    && self
                        .peek_at(2)
                        .is_some_and(|t| t.is("=") || t.is(",") || t.is(";") || t.is("["));
                if starts_declarator {
                    return Ok(());
                }
                self.pos += 1;
                continue;
            }
            match tok.text.as_str() {
                "(" if tok.kind == TokenKind::Punct => {
                    self.skip_group("(", ")")?;
                }
                "{" if tok.kind == TokenKind::Punct => {
                    self.skip_group("{", "}")?;
                }
                "[" if tok.kind == TokenKind::Punct => {
                    self.skip_group("[", "]")?;
                }
                ")" | "}" | "]" if tok.kind == TokenKind::Punct => {
                    return Err(self.error_here(format!("unbalanced '{}' in initializer", tok.text)));
                }
                _ => self.pos += 1,
            }
        }
    }

    /// Returns `(type, name)` for each formal parameter.
    fn parameters(&mut self) -> Result<Vec<(String, String)>, ParseError> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.peek_is(")") {
            self.pos += 1;
            return Ok(params);
        }
        loop {
            while self.peek_word("final") || self.peek_is("@") {
                if self.peek_is("@") {
                    self.annotation()?;
                } else {
                    self.pos += 1;
                }
            }
            let ty = self.type_ref()?;
            // receiver parameter `Foo this`
            let name = if self.peek_word("this") {
                self.pos += 1;
                None
            } else {
                let name = self.ident()?;
                while self.peek_is("[") {
                    self.skip_group("[", "]")?;
                }
                Some(name)
            };
            if let Some(name) = name {
                params.push((ty, name));
            }
            if self.peek_is(",") {
                self.pos += 1;
                continue;
            }
            self.expect(")")?;
            return Ok(params);
        }
    }

    fn block(&mut self) -> Result<(usize, usize), ParseError> {
        let open = self.pos;
        let close = self.skip_group("{", "}")?;
        Ok((open, close))
    }

    #[allow(clippy::too_many_arguments)]
    fn pending_method(
        &self,
        name: String,
        params: Vec<(String, String)>,
        return_type: Option<String>,
        mods: &Modifiers,
        visibility: Visibility,
        is_constructor: bool,
        start: usize,
        end: usize,
        facts: body::BodyFacts,
    ) -> PendingMethod {
        let param_names = params.iter().map(|(_, n)| n.clone()).collect();
        PendingMethod {
            model: MethodModel {
                name,
                param_count: params.len(),
                return_type,
                loc: self.loc_between(start, end),
                cyclomatic: facts.cyclomatic,
                is_static: mods.is_static,
                is_abstract: mods.is_abstract,
                is_override: mods.is_override,
                is_constructor,
                visibility,
                invoked_names: facts.invoked_names.clone(),
                max_chain_length: facts.max_chain_length,
                reads_fields: BTreeSet::new(),
                writes_fields: BTreeSet::new(),
                conditionals: facts.conditionals,
                loops: facts.loops,
                returns: facts.returns,
                qualified_accesses: facts.qualified_accesses.clone(),
            },
            params: param_names,
            facts,
        }
    }
}

fn lower_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}
