//! Tokenizer for model files. Keywords are contextual: the lexer emits bare
//! identifiers and the parser decides what they mean, so action and state
//! names are never reserved. `#` starts a line comment.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LBrack,
    RBrack,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Arrow,    // ->
    MemArrow, // mem->
    Query,    // ?
    MemQuery, // mem?
    Bang,
    Star,
    DotDot,
    DashLBrack, // -[  (FSM transition opener)
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LBrack => write!(f, "`[`"),
            Tok::RBrack => write!(f, "`]`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Assign => write!(f, "`=`"),
            Tok::Eq => write!(f, "`==`"),
            Tok::Ne => write!(f, "`!=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Ge => write!(f, "`>=`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::MemArrow => write!(f, "`mem->`"),
            Tok::Query => write!(f, "`?`"),
            Tok::MemQuery => write!(f, "`mem?`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Star => write!(f, "`*`"),
            Tok::DotDot => write!(f, "`..`"),
            Tok::DashLBrack => write!(f, "`-[`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// A positioned lexing or parsing diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diag {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for Diag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    toks: Vec<Token>,
    diags: Vec<Diag>,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn push(&mut self, tok: Tok, line: usize, col: usize) {
        self.toks.push(Token { tok, line, col });
    }

    fn err(&mut self, msg: impl Into<String>, line: usize, col: usize) {
        self.diags.push(Diag { line, col, msg: msg.into() });
    }

    fn int(&mut self, line: usize, col: usize, negative: bool) {
        let mut n = String::new();
        if negative {
            n.push('-');
        }
        while let Some(d) = self.peek() {
            if d.is_ascii_digit() {
                n.push(self.bump());
            } else {
                break;
            }
        }
        match n.parse() {
            Ok(v) => self.push(Tok::Int(v), line, col),
            Err(_) => self.err(format!("number out of range: {n}"), line, col),
        }
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some() && self.bump() != '\n' {}
                }
                '[' => {
                    self.bump();
                    self.push(Tok::LBrack, line, col);
                }
                ']' => {
                    self.bump();
                    self.push(Tok::RBrack, line, col);
                }
                '(' => {
                    self.bump();
                    self.push(Tok::LParen, line, col);
                }
                ')' => {
                    self.bump();
                    self.push(Tok::RParen, line, col);
                }
                '{' => {
                    self.bump();
                    self.push(Tok::LBrace, line, col);
                }
                '}' => {
                    self.bump();
                    self.push(Tok::RBrace, line, col);
                }
                ',' => {
                    self.bump();
                    self.push(Tok::Comma, line, col);
                }
                ';' => {
                    self.bump();
                    self.push(Tok::Semi, line, col);
                }
                ':' => {
                    self.bump();
                    self.push(Tok::Colon, line, col);
                }
                '?' => {
                    self.bump();
                    self.push(Tok::Query, line, col);
                }
                '*' => {
                    self.bump();
                    self.push(Tok::Star, line, col);
                }
                '=' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(Tok::Eq, line, col);
                    } else {
                        self.push(Tok::Assign, line, col);
                    }
                }
                '!' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(Tok::Ne, line, col);
                    } else {
                        self.push(Tok::Bang, line, col);
                    }
                }
                '<' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(Tok::Le, line, col);
                    } else {
                        self.push(Tok::Lt, line, col);
                    }
                }
                '>' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(Tok::Ge, line, col);
                    } else {
                        self.push(Tok::Gt, line, col);
                    }
                }
                '.' => {
                    self.bump();
                    if self.peek() == Some('.') {
                        self.bump();
                        self.push(Tok::DotDot, line, col);
                    } else {
                        self.err("stray `.`", line, col);
                    }
                }
                '-' => {
                    self.bump();
                    match self.peek() {
                        Some('>') => {
                            self.bump();
                            self.push(Tok::Arrow, line, col);
                        }
                        Some('[') => {
                            self.bump();
                            self.push(Tok::DashLBrack, line, col);
                        }
                        Some(d) if d.is_ascii_digit() => self.int(line, col, true),
                        _ => self.err("stray `-` (expected `->`, `-[` or a number)", line, col),
                    }
                }
                d if d.is_ascii_digit() => self.int(line, col, false),
                a if a.is_ascii_alphabetic() || a == '_' => {
                    let mut s = String::new();
                    while let Some(a) = self.peek() {
                        if a.is_ascii_alphanumeric() || a == '_' {
                            s.push(self.bump());
                        } else {
                            break;
                        }
                    }
                    // `mem->` and `mem?` are single operator tokens.
                    if s == "mem" && self.peek() == Some('?') {
                        self.bump();
                        self.push(Tok::MemQuery, line, col);
                    } else if s == "mem" && self.peek() == Some('-') && self.peek2() == Some('>') {
                        self.bump();
                        self.bump();
                        self.push(Tok::MemArrow, line, col);
                    } else {
                        self.push(Tok::Ident(s), line, col);
                    }
                }
                other => {
                    self.bump();
                    self.err(format!("unexpected character `{other}`"), line, col);
                }
            }
        }
        let (line, col) = (self.line, self.col);
        self.push(Tok::Eof, line, col);
    }
}

pub fn lex(text: &str) -> Result<Vec<Token>, Vec<Diag>> {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        toks: Vec::new(),
        diags: Vec::new(),
    };
    lx.run();
    if lx.diags.is_empty() {
        Ok(lx.toks)
    } else {
        Err(lx.diags)
    }
}
