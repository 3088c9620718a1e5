use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    Quoted(String),
    Number(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Implies,
    RevImplies,
    Equiv,
    Xor,
    Nor,
    Nand,
    Eq,
    Neq,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) | Tok::Dollar(s) | Tok::Number(s) => s.clone(),
            Tok::Quoted(s) => format!("'{s}'"),
            Tok::Eof => "end of input".to_owned(),
            other => other.symbol().to_owned(),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Bang => "!",
            Tok::Question => "?",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Implies => "=>",
            Tok::RevImplies => "<=",
            Tok::Equiv => "<=>",
            Tok::Xor => "<~>",
            Tok::Nor => "~|",
            Tok::Nand => "~&",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Lower(_) => "lower_word",
            Tok::Upper(_) => "variable",
            Tok::Dollar(_) => "$word",
            Tok::Quoted(_) => "quoted atom",
            Tok::Number(_) => "number",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(text: &str, origin: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ParseError::Syntax {
        file: origin.to_owned(),
        line,
        col,
        message: msg,
        expected: Vec::new(),
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i, &mut line, &mut col);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(2, &mut i, &mut line, &mut col);
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(l0, c0, "unterminated comment".into()));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(2, &mut i, &mut line, &mut col);
                    break;
                }
                advance(1, &mut i, &mut line, &mut col);
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let multi = [
            ("<=>", Tok::Equiv),
            ("<~>", Tok::Xor),
            ("=>", Tok::Implies),
            ("<=", Tok::RevImplies),
            ("~|", Tok::Nor),
            ("~&", Tok::Nand),
            ("!=", Tok::Neq),
        ];
        if let Some((s, t)) = multi.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push(Spanned { tok: t.clone(), line: l0, col: c0 });
            advance(s.len(), &mut i, &mut line, &mut col);
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '!' => Some(Tok::Bang),
            '?' => Some(Tok::Question),
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Spanned { tok: t, line: l0, col: c0 });
            advance(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '\'' || c == '"' {
            let mut s = String::new();
            advance(1, &mut i, &mut line, &mut col);
            loop {
                match chars.get(i) {
                    None => return Err(err(l0, c0, "unterminated quoted atom".into())),
                    Some('\\') if i + 1 < chars.len() => {
                        s.push(chars[i + 1]);
                        advance(2, &mut i, &mut line, &mut col);
                    }
                    Some(&q) if q == c => {
                        advance(1, &mut i, &mut line, &mut col);
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(1, &mut i, &mut line, &mut col);
                    }
                }
            }
            out.push(Spanned { tok: Tok::Quoted(s), line: l0, col: c0 });
            continue;
        }
        let is_word = |ch: char| ch.is_alphanumeric() || ch == '_';
        if c == '$' || is_word(c) {
            let start = i;
            advance(1, &mut i, &mut line, &mut col);
            while i < chars.len() && is_word(chars[i]) {
                advance(1, &mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if c == '$' {
                Tok::Dollar(word)
            } else if c.is_ascii_digit() {
                Tok::Number(word)
            } else if c.is_uppercase() {
                Tok::Upper(word)
            } else {
                Tok::Lower(word)
            };
            out.push(Spanned { tok, line: l0, col: c0 });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character {c:?}")));
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}
