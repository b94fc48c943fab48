mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use c11kit::ast::BinOp;
use c11kit::lexer;
use c11kit::lower;
use c11kit::parser::SrEvent;
use c11kit::pretty;
use c11kit::source::splice;

/// Text made of C-ish fragments, including splices, comments, annotations,
/// directives and a few bytes the lexer must recover from.
fn c_like() -> impl Strategy<Value = String> {
    let frags = vec![
        "int", "x", "_y1", " ", "  ", "\n", "\t", "\\\n", "\\\r\n", "\\", "1", "0x1f", "1.5e3", "07u", "'a'", "'\\n'",
        "\"s\"", "\"a\\\"b\"", "/* c */", "/*", "*/", "// c\n", "//@ highlight\n", "/*@ highlight */", "/*@* C ⟨int y;⟩ */",
        "#define N 1\n", "# include <a.h>\n", "+", "++", "<<=", "->", "...", "%:", "<:", ":>", ";", "{", "}", "(", ")",
        "$", "`", "@", "/", "*", "é",
    ];
    prop::collection::vec(prop::sample::select(frags), 0..40).prop_map(|v| v.concat())
}

/// Backslash-newline removal done the obvious way.
fn splice_oracle(s: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("\\\n").or_else(|| rest.strip_prefix("\\\r\n")) {
            rest = r;
            continue;
        }
        let c = rest.chars().next().unwrap();
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    out
}

proptest! {
    #[test]
    fn splice_matches_oracle(s in c_like()) {
        let (logical, map) = splice(&s);
        prop_assert_eq!(&logical, &splice_oracle(&s));
        prop_assert_eq!(map.reconstruct(&logical, &s), s.clone());
        for i in 0..logical.len() {
            prop_assert_eq!(s.as_bytes()[map.to_physical(i)], logical.as_bytes()[i]);
            prop_assert_eq!(map.to_logical(map.to_physical(i)), i);
        }
    }

    #[test]
    fn lexing_is_lossless(s in c_like()) {
        let (logical, _) = splice(&s);
        let out = lexer::tokenize(&logical);
        let mut pieces: Vec<(usize, usize, bool)> = out
            .tokens
            .iter()
            .map(|t| (t.range.start.offset, t.range.end.offset, true))
            .chain(out.trivia.iter().filter(|t| !t.nested).map(|t| (t.range.start.offset, t.range.end.offset, false)))
            .collect();
        pieces.sort();
        let mut at = 0;
        for (start, end, _) in &pieces {
            prop_assert!(*start >= at, "overlap at {} in {:?}", start, logical);
            prop_assert!(logical[at..*start].chars().all(char::is_whitespace), "gap {:?}", &logical[at..*start]);
            at = *end;
        }
        prop_assert!(logical[at..].chars().all(char::is_whitespace));
        for t in &out.tokens {
            prop_assert!(!t.range.is_empty());
            prop_assert_eq!(&logical[t.range.start.offset..t.range.end.offset], t.text.as_str());
        }
    }

    #[test]
    fn lexing_is_deterministic(s in c_like()) {
        let a = lexer::tokenize(&s);
        let b = lexer::tokenize(&s);
        prop_assert_eq!(a.tokens, b.tokens);
        prop_assert_eq!(a.trivia, b.trivia);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forest_is_coherent(g in common::gen::program()) {
        let text = g.to_c();
        let a = common::analyze_opts("gen.c", &text, &common::parse_only());
        prop_assert!(!a.has_errors(), "{}", common::errors(&a));
        let f = &a.parse.forest;
        prop_assert_eq!(f.shift_count(), a.tokens.len());
        for (i, n) in f.nodes.iter().enumerate() {
            if let SrEvent::Reduce { arity, .. } = n.event {
                prop_assert_eq!(n.children.len(), arity as usize);
                for &c in &n.children {
                    prop_assert!(c < i as u32);
                    prop_assert_eq!(f.node(c).parent, Some(i as u32));
                    prop_assert!(n.range.contains(&f.node(c).range));
                }
                if let (Some(&first), Some(&last)) = (n.children.first(), n.children.last()) {
                    prop_assert_eq!(n.range.start, f.node(first).range.start);
                    prop_assert_eq!(n.range.end, f.node(last).range.end);
                }
            }
        }
        let again = common::analyze_opts("gen.c", &text, &common::parse_only());
        prop_assert_eq!(f.dump(), again.parse.forest.dump());
    }

    #[test]
    fn generated_programs_round_trip(g in common::gen::program()) {
        let a = common::analyze_opts("gen.c", &g.to_c(), &common::parse_only());
        let printed = pretty::translation_unit(&a.parse.ast);
        let b = common::analyze_opts("gen.c", &printed, &common::parse_only());
        prop_assert!(!b.has_errors(), "{}", common::errors(&b));
        prop_assert_eq!(pretty::sexp_tu(&a.parse.ast), pretty::sexp_tu(&b.parse.ast));
    }
}

const OPS: [BinOp; 18] = [
    BinOp::Mul,
    BinOp::Div,
    BinOp::Rem,
    BinOp::Add,
    BinOp::Sub,
    BinOp::Shl,
    BinOp::Shr,
    BinOp::Lt,
    BinOp::Gt,
    BinOp::Le,
    BinOp::Ge,
    BinOp::Eq,
    BinOp::Ne,
    BinOp::BitAnd,
    BinOp::BitXor,
    BinOp::BitOr,
    BinOp::And,
    BinOp::Or,
];

/// Unbounded-integer semantics checked against i128, which cannot
/// overflow for 32-bit operands and shifts below 64.
fn i128_oracle(op: BinOp, a: i128, b: i128) -> Option<i128> {
    let t = |c: bool| c as i128;
    Some(match op {
        BinOp::Mul => a * b,
        BinOp::Div => a.checked_div(b)?,
        BinOp::Rem => a.checked_rem(b)?,
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Shl => a << u32::try_from(b).ok()?,
        BinOp::Shr => a >> u32::try_from(b).ok()?,
        BinOp::Lt => t(a < b),
        BinOp::Gt => t(a > b),
        BinOp::Le => t(a <= b),
        BinOp::Ge => t(a >= b),
        BinOp::Eq => t(a == b),
        BinOp::Ne => t(a != b),
        BinOp::BitAnd => a & b,
        BinOp::BitXor => a ^ b,
        BinOp::BitOr => a | b,
        BinOp::And => t(a != 0 && b != 0),
        BinOp::Or => t(a != 0 || b != 0),
    })
}

proptest! {
    #[test]
    fn binary_ops_match_i128(op in prop::sample::select(&OPS[..]), a in any::<i32>(), b in any::<i32>(), s in -2i32..64) {
        let b = if matches!(op, BinOp::Shl | BinOp::Shr) { s } else { b };
        let got = lower::binary(op, &BigInt::from(a), &BigInt::from(b));
        prop_assert_eq!(got, i128_oracle(op, a as i128, b as i128).map(BigInt::from));
    }
}
