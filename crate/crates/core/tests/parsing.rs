use bilex::bundled;
use bilex::parser::tokenize;
use bilex::term::Index;
use proptest::prelude::*;

fn noun_phrase() -> impl Strategy<Value = Vec<&'static str>> {
    (
        prop::collection::vec(prop::sample::select(vec!["fat", "big", "black"]), 0..3),
        prop::sample::select(vec!["man", "dog", "bucket"]),
    )
        .prop_map(|(adjs, noun)| {
            let mut np = vec!["the"];
            np.extend(adjs);
            np.push(noun);
            np
        })
}

/// Sentence tokens plus the positions of subject items, object items, verb
/// and (if any) particle.
#[derive(Debug, Clone)]
struct Sentence {
    tokens: Vec<&'static str>,
    subject: Vec<usize>,
    object: Vec<usize>,
    verb: usize,
    particle: Option<usize>,
}

fn sentence() -> impl Strategy<Value = Sentence> {
    (noun_phrase(), noun_phrase(), 0..3u8).prop_map(|(subj, obj, shape)| {
        let mut tokens = subj.clone();
        let subject: Vec<usize> = (0..subj.len()).collect();
        let verb = tokens.len();
        tokens.push("kicked");
        let mut particle = None;
        if shape == 1 {
            particle = Some(tokens.len());
            tokens.push("out");
        }
        let start = tokens.len();
        tokens.extend(&obj);
        let object: Vec<usize> = (start..tokens.len()).collect();
        if shape == 2 {
            particle = Some(tokens.len());
            tokens.push("out");
        }
        Sentence {
            tokens,
            subject,
            object,
            verb,
            particle,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bags_conserve_tokens_and_are_ground(s in sentence()) {
        let parser = bundled::english();
        let text = s.tokens.join(" ");
        let tokens = tokenize(&text).unwrap();
        let parses: Vec<_> = parser.parse_sentence(&text).unwrap().collect();
        prop_assert!(!parses.is_empty());
        for d in &parses {
            let bag = d.get_bag();
            prop_assert_eq!(bag.len(), tokens.len());
            let mut surfaces: Vec<String> = bag
                .iter()
                .map(|i| i.surface.clone().unwrap_or_else(|| i.word.to_string()))
                .collect();
            let mut expected = tokens.clone();
            surfaces.sort();
            expected.sort();
            prop_assert_eq!(surfaces, expected);
            prop_assert!(bag.is_ground());
        }
    }

    #[test]
    fn coindexation_follows_the_tree(s in sentence()) {
        let parser = bundled::english();
        let bag = parser.parse_sentence(&s.tokens.join(" ")).unwrap().next().unwrap().get_bag();
        let arg = |pos: usize, k: usize| bag.items()[pos].desc.args[k];
        let subj = arg(s.subject[0], 0);
        let obj = arg(s.object[0], 0);
        prop_assert!(s.subject.iter().all(|&p| arg(p, 0) == subj));
        prop_assert!(s.object.iter().all(|&p| arg(p, 0) == obj));
        prop_assert_ne!(subj, obj);
        let verb = &bag.items()[s.verb].desc.args;
        prop_assert_eq!(verb[1], subj);
        prop_assert_eq!(verb[2], obj);
        if let Some(p) = s.particle {
            prop_assert_eq!(arg(p, 0), verb[0]);
        }
    }

    #[test]
    fn parsing_is_deterministic(s in sentence()) {
        let parser = bundled::english();
        let text = s.tokens.join(" ");
        let run = || -> Vec<(String, String)> {
            parser
                .parse_sentence(&text)
                .unwrap()
                .map(|d| (d.tree.to_string(), d.get_bag().table()))
                .collect()
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn worked_example_bags() {
    let src = bundled::english()
        .parse_sentence(bundled::WORKED_SOURCE)
        .unwrap()
        .next()
        .unwrap()
        .get_bag();
    assert_eq!(
        src.table(),
        "Id  Word   Cat          Indices\n\
         1   the    determiner   [0]\n\
         2   fat    adjective    [0]\n\
         3   man    noun         [0]\n\
         4   kick   trans_verb   [1,0,2]\n\
         5   out    advparticle  [1]\n\
         6   the    determiner   [2]\n\
         7   black  adjective    [2]\n\
         8   dog    noun         [2]\n"
    );
    let tgt = bundled::spanish()
        .parse_sentence(bundled::WORKED_TARGET)
        .unwrap()
        .next()
        .unwrap()
        .get_bag();
    let words: Vec<String> = tgt.iter().map(|i| i.word.to_string()).collect();
    assert_eq!(words, ["el", "hombre", "gordo", "echar", "el", "perro", "negro"]);
    let g = Index::Ground;
    assert_eq!(tgt.items()[3].desc.args, vec![g(1), g(0), g(2)]);
}
