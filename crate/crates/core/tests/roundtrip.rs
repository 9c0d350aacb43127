mod common;

use common::TermGen;
use hornkit::logic::parse::parse_term;
use hornkit::logic::print::print;
use hornkit::session::script::{quote, unquote, Command, Script};
use hornkit::term::aconv;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn command() -> impl Strategy<Value = Command> {
    prop_oneof![
        "[a-zA-Z][a-zA-Z0-9_]{0,8}( [1-9])?".prop_map(Command::Apply),
        (1usize..50).prop_map(Command::Backtrack),
        Just(Command::Undo),
        Just(Command::Qed),
    ]
}

proptest! {
    #[test]
    fn quoting_round_trips(s in any::<String>()) {
        prop_assert_eq!(unquote(&quote(&s)), Some(s));
    }

    #[test]
    fn scripts_round_trip(goal in "[^\n\r]{0,40}", commands in prop::collection::vec(command(), 0..10)) {
        let script = Script { goal, commands: commands.into_iter().enumerate().map(|(k, c)| (k + 2, c)).collect() };
        let again = Script::parse(&script.render()).unwrap();
        prop_assert_eq!(again, script);
    }

    #[test]
    fn printed_terms_read_back(seed in any::<u64>(), logic in prop::sample::select(vec!["bare", "fol", "ctt"]), depth in 0u32..5) {
        let l = hornkit::logic::builtin(logic).unwrap();
        let mut gen = TermGen::new(&l.sig, ChaCha8Rng::seed_from_u64(seed));
        let atomics = gen.atomics();
        let a = atomics[(seed % atomics.len() as u64) as usize].clone();
        let t = gen.term(&a, depth);
        let text = print(&l.sig, &t);
        let back = parse_term(&l.sig, &text).map_err(|e| TestCaseError::fail(format!("`{text}`: {e}")))?;
        prop_assert!(aconv(&back, &t), "`{}` reads back as {:?}", text, back);
        prop_assert_eq!(print(&l.sig, &back), text);
    }
}
