//! Seeded synthetic corpora for tests, fixtures and benchmarks.
//!
//! Filler sentences are chosen so that they never contain a form from the
//! shipped lexicon; every verb use in a generated post is planted on purpose.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::Region;
use crate::ingest::Post;
use crate::lexicon::WordClass;
use crate::matcher::{CorpusSummary, Variant, VariantCounts};
use crate::morphology::{ExpandedEntry, ExpandedLexicon};

pub const FIXTURE_SEED: u64 = 1_514_764_800;
const EPOCH: i64 = 1_514_764_800;

pub const ES_FILLER: &[&str] = &[
    "qué día tan largo",
    "hoy hace mucho calor en la ciudad",
    "no puedo creer lo que pasó anoche",
    "la verdad es que no sé qué pensar",
    "mañana tengo clase muy temprano",
    "me encanta esta canción nueva",
    "estoy muy cansada después del trabajo",
    "vamos a la playa el sábado con los amigos",
    "mi mamá cocinó algo riquísimo",
    "por fin llegó el fin de semana",
    "ojalá que mañana llueva un poco",
    "el partido de ayer estuvo buenísimo",
    "nadie me entiende como mi gato",
    "qué bonito está el cielo esta tarde",
    "tengo hambre y no hay nada en la casa",
    "la película de anoche me gustó mucho",
    "gracias a todos por los mensajes",
    "hoy es el cumpleaños de mi hermano",
    "ya casi se acaba la semana",
    "estoy harto del tráfico de todos los días",
    "qué pena que se canceló el concierto",
    "mis amigos son lo mejor que tengo",
    "necesito unas vacaciones urgentes",
    "la comida de mi abuela es la mejor del mundo",
    "se me olvidó cargar el celular otra vez",
    "dónde están las llaves de la casa",
    "el lunes empiezo el gimnasio",
    "qué lindo día para quedarse en casa",
    "anoche no pude dormir nada",
    "esta semana fue muy difícil para todos",
];

pub const EN_FILLER: &[&str] = &[
    "what a long day at work",
    "i can't believe what happened last night",
    "going to bed now, see you tomorrow",
    "this new song is so good",
    "my phone died again, of course",
    "we are going to the beach on saturday",
    "the game last night was crazy",
    "nobody understands me except my cat",
    "happy birthday to my little brother",
    "so tired of the traffic every single day",
    "best pizza in the city, no doubt",
    "finally friday, time to relax",
    "thank you all for the kind messages",
    "the weather is beautiful this afternoon",
    "i need a vacation right now",
];

const HASHTAGS: &[&str] = &["#finde", "#viernes", "#lunes", "#fútbol", "#música", "#mood"];
const MENTIONS: &[&str] = &["@ana", "@carlos_22", "@lau", "@mrodriguez", "@pepe"];
const URLS: &[&str] = &["https://t.co/abc123", "http://example.com/nota", "https://bit.ly/xyz"];

/// Loanword bases whose phrases are not shared with any other entry.
pub const PLANTED_LOANWORDS: &[&str] = &[
    "like", "tweet", "chat", "post", "ban", "block", "hack", "google", "link", "text", "selfie", "upvote",
    "downvote", "flex", "lag", "rant", "report", "sample", "troll", "stalk",
];

/// Native bases used for planted native uses.
pub const PLANTED_NATIVE: &[&str] = &["shower", "jump", "travel", "walk"];

fn entry<'a>(lexicon: &'a ExpandedLexicon, base: &str, class: WordClass) -> &'a ExpandedEntry {
    lexicon
        .iter()
        .find(|e| e.entry.base == base && e.entry.word_class == class)
        .unwrap_or_else(|| panic!("lexicon lacks {class} `{base}`"))
}

/// A random surface realizing `variant` for `e`.
pub fn realize(e: &ExpandedEntry, variant: Variant, rng: &mut impl Rng) -> String {
    match variant {
        Variant::Integrated => {
            let forms: Vec<&String> = e.surfaces.integrated.iter().collect();
            let form = forms.choose(rng).expect("entry has integrated forms");
            if e.surfaces.integrated_reflexive {
                let clitic = ["me", "te", "se", "nos"].choose(rng).expect("non-empty");
                format!("{clitic} {form}")
            } else {
                form.to_string()
            }
        }
        Variant::Light => {
            let phrases: Vec<_> = e.surfaces.light.iter().collect();
            phrases.choose(rng).expect("entry has light phrases").to_string()
        }
    }
}

fn filler<'a>(rng: &mut impl Rng, list: &[&'a str]) -> &'a str {
    list.choose(rng).expect("non-empty filler list")
}

fn post(id: String, author: &str, timestamp: i64, text: String, is_retweet: bool, location: Option<&str>) -> Post {
    Post { id, author_id: author.to_string(), timestamp, text, is_retweet, profile_location: location.map(str::to_string) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedUse {
    pub post_id: String,
    pub base: String,
    pub word_class: WordClass,
    pub variant: Variant,
    pub surface: String,
}

/// What the shipped fixture corpus is known to contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub seed: u64,
    pub posts: usize,
    pub retweets: usize,
    pub authors: BTreeMap<String, usize>,
    pub loanword: VariantCounts,
    pub native_author: String,
    pub native: VariantCounts,
    /// Unlisted `-ear` verb planted for candidate discovery.
    pub discovery_token: String,
    pub planted: Vec<PlantedUse>,
}

/// The 1,000-post fixture: 7 integrated and 3 light loanword uses, one
/// author with 4 integrated and 1 light native use, retweets that repeat
/// planted forms, and one unlisted "hypear".
pub fn fixture_corpus(lexicon: &ExpandedLexicon) -> (Vec<Post>, FixtureManifest) {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let authors: Vec<String> = (1..=40).map(|i| format!("u{i:03}")).collect();
    let locations = ["Lima, Perú", "Madrid", "Miami", "Toronto", "Buenos Aires, Argentina", "en mi casa"];
    let author_location: BTreeMap<&str, Option<&str>> = authors
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), (i % 7 != 6).then(|| locations[i % locations.len()])))
        .collect();

    let loan_integrated = [("like", 6), ("tweet", 7), ("chat", 8), ("google", 9), ("post", 10), ("ban", 11), ("stalk", 12)];
    let loan_light = ["like", "tweet", "google"];
    let native_integrated = ["shower", "jump", "travel", "jump"];
    let native_author = "u007".to_string();

    // post index -> (base, class, variant)
    let mut plan: BTreeMap<usize, (&str, WordClass, Variant)> = BTreeMap::new();
    for (k, (base, _)) in loan_integrated.iter().enumerate() {
        plan.insert(37 + 131 * k, (*base, WordClass::Loanword, Variant::Integrated));
    }
    for (k, base) in loan_light.iter().enumerate() {
        plan.insert(101 + 257 * k, (*base, WordClass::Loanword, Variant::Light));
    }
    let mut native_slots = Vec::new();
    for (k, base) in native_integrated.iter().enumerate() {
        native_slots.push(200 + 150 * k);
        plan.insert(200 + 150 * k, (*base, WordClass::Native, Variant::Integrated));
    }
    native_slots.push(920);
    plan.insert(920, ("walk", WordClass::Native, Variant::Light));
    let discovery_slot = 555;
    let retweet_slots: Vec<usize> = (0..N).filter(|i| i % 10 == 3 && !plan.contains_key(i)).collect();

    let mut posts = Vec::with_capacity(N);
    let mut planted = Vec::new();
    for i in 0..N {
        let author = if native_slots.contains(&i) { native_author.as_str() } else { authors[(i * 7 + i / 40) % authors.len()].as_str() };
        let id = format!("p{:04}", i + 1);
        let ts = EPOCH + (i as i64) * 3_600 + rng.gen_range(0..600);
        let base_text = filler(&mut rng, ES_FILLER).to_string();
        let is_rt = retweet_slots.contains(&i);
        let mut text = if let Some(&(base, class, variant)) = plan.get(&i) {
            let surface = realize(entry(lexicon, base, class), variant, &mut rng);
            planted.push(PlantedUse { post_id: id.clone(), base: base.into(), word_class: class, variant, surface: surface.clone() });
            format!("{base_text}, {surface} hoy")
        } else if i == discovery_slot {
            format!("{base_text}, hay que hypear el concierto")
        } else if is_rt {
            let e = entry(lexicon, PLANTED_LOANWORDS[i % PLANTED_LOANWORDS.len()], WordClass::Loanword);
            format!("RT {} {}", MENTIONS[i % MENTIONS.len()], realize(e, Variant::Integrated, &mut rng))
        } else {
            base_text
        };
        match i % 13 {
            0 => text.push_str(&format!(" {}", HASHTAGS[i % HASHTAGS.len()])),
            5 => text = format!("{} {text}", MENTIONS[i % MENTIONS.len()]),
            9 => text.push_str(&format!(" {}", URLS[i % URLS.len()])),
            _ => {}
        }
        posts.push(post(id, author, ts, text, is_rt, author_location.get(author).copied().flatten()));
    }

    let mut author_counts = BTreeMap::new();
    for p in &posts {
        *author_counts.entry(p.author_id.clone()).or_insert(0) += 1;
    }
    let count = |class: WordClass, variant: Variant| planted.iter().filter(|u| u.word_class == class && u.variant == variant).count() as u64;
    let manifest = FixtureManifest {
        seed: FIXTURE_SEED,
        posts: N,
        retweets: retweet_slots.len(),
        authors: author_counts,
        loanword: VariantCounts {
            integrated: count(WordClass::Loanword, Variant::Integrated),
            light: count(WordClass::Loanword, Variant::Light),
        },
        native_author,
        native: VariantCounts {
            integrated: count(WordClass::Native, Variant::Integrated),
            light: count(WordClass::Native, Variant::Light),
        },
        discovery_token: "hypear".into(),
        planted,
    };
    (posts, manifest)
}

/// One JSON object per line.
pub fn to_jsonl(posts: &[Post]) -> String {
    posts.iter().map(|p| serde_json::to_string(p).expect("posts serialize") + "\n").collect()
}

/// Posts dense with planted phrases, determiners and punctuation, for
/// exercising the matcher against an exhaustive oracle.
pub fn random_match_posts(lexicon: &ExpandedLexicon, n: usize, seed: u64) -> Vec<Post> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = ["un", "una", "el", "la", "me", "se", "muy", "gran", "en", "como", "y", "que", ",", "!", "#tag", "@user", "https://t.co/x"];
    (0..n)
        .map(|i| {
            let mut parts: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(1..8) {
                match rng.gen_range(0..10) {
                    0..=3 => {
                        let e = &lexicon.entries[rng.gen_range(0..lexicon.len())];
                        let variant = if rng.gen_bool(0.5) { Variant::Integrated } else { Variant::Light };
                        let mut s = realize(e, variant, &mut rng);
                        if rng.gen_bool(0.2) {
                            s = s.to_uppercase();
                        }
                        parts.push(s);
                    }
                    4..=6 => parts.push(noise.choose(&mut rng).expect("non-empty").to_string()),
                    _ => parts.push(filler(&mut rng, ES_FILLER).to_string()),
                }
            }
            post(format!("r{i}"), &format!("a{}", i % 97), EPOCH + i as i64, parts.join(" "), false, None)
        })
        .collect()
}

/// Domain A integrated counts out of 200 per word: mean rate 0.91.
pub fn compare_counts_a() -> Vec<u64> {
    (0..50).map(|i| (182 + (i % 5) * 3 - 6) as u64).collect()
}

/// Domain B integrated counts out of 200 per word: mean rate 0.82.
pub fn compare_counts_b() -> Vec<u64> {
    (0..50).map(|i| (164 + 2 * (i % 10) - 9) as u64).collect()
}

pub const COMPARE_USES_PER_WORD: u64 = 200;

/// Two corpus summaries over the same 50 loanwords, 200 uses each, with mean
/// per-word integration rates of 0.91 (A) and 0.82 (B).
pub fn compare_fixture(lexicon: &ExpandedLexicon) -> (CorpusSummary, CorpusSummary) {
    let bases: Vec<&str> =
        lexicon.iter().filter(|e| e.entry.word_class == WordClass::Loanword).map(|e| e.entry.base.as_str()).take(50).collect();
    let build = |counts: Vec<u64>| CorpusSummary {
        counts: bases
            .iter()
            .zip(counts)
            .map(|(b, k)| ((b.to_string(), WordClass::Loanword), VariantCounts { integrated: k, light: COMPARE_USES_PER_WORD - k }))
            .collect(),
    };
    (build(compare_counts_a()), build(compare_counts_b()))
}

/// Log-odds of choosing the integrated form in the planted regression corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedModel {
    pub intercept: f64,
    pub hashtag: f64,
    pub mention: f64,
    pub latin_america: f64,
    pub europe: f64,
    pub us: f64,
    pub other: f64,
    pub high_spanish: f64,
    pub medium_spanish: f64,
}

impl Default for PlantedModel {
    fn default() -> Self {
        PlantedModel {
            intercept: 0.3,
            hashtag: 0.5,
            mention: -0.6,
            latin_america: 0.6,
            europe: -0.6,
            us: -0.4,
            other: 0.4,
            high_spanish: 0.8,
            medium_spanish: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlantedBin {
    Low,
    Medium,
    High,
}

impl PlantedModel {
    pub fn log_odds(&self, hashtag: bool, mention: bool, region: Region, bin: PlantedBin) -> f64 {
        let region_effect = match region {
            Region::Unknown => 0.0,
            Region::LatinAmerica => self.latin_america,
            Region::Europe => self.europe,
            Region::US => self.us,
            Region::Other => self.other,
        };
        let bin_effect = match bin {
            PlantedBin::Low => 0.0,
            PlantedBin::Medium => self.medium_spanish,
            PlantedBin::High => self.high_spanish,
        };
        self.intercept + if hashtag { self.hashtag } else { 0.0 } + if mention { self.mention } else { 0.0 } + region_effect + bin_effect
    }
}

fn location_for(region: Region, rng: &mut impl Rng) -> Option<&'static str> {
    let options: &[Option<&str>] = match region {
        Region::Unknown => &[None, Some("en mi casa"), Some("el mundo")],
        Region::LatinAmerica => &[Some("Lima, Perú"), Some("Bogotá"), Some("Buenos Aires, Argentina"), Some("CDMX")],
        Region::Europe => &[Some("Madrid"), Some("Barcelona, España"), Some("Lisboa")],
        Region::US => &[Some("Miami"), Some("Houston, Texas"), Some("New York")],
        Region::Other => &[Some("Toronto"), Some("Tokyo"), Some("Sydney")],
    };
    *options.choose(rng).expect("non-empty")
}

/// Posts from `authors` authors, each with `records_per_author` planted
/// loanword uses whose integrated/light choice follows `model`, two native
/// uses, and enough English posts to put the author in the drawn language
/// bin (none for high, 4 for medium, 16 for low).
pub fn planted_regression_corpus(
    lexicon: &ExpandedLexicon,
    authors: usize,
    records_per_author: usize,
    seed: u64,
    model: &PlantedModel,
) -> Vec<Post> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let loanwords: Vec<&ExpandedEntry> = PLANTED_LOANWORDS.iter().map(|b| entry(lexicon, b, WordClass::Loanword)).collect();
    let natives: Vec<&ExpandedEntry> = PLANTED_NATIVE.iter().map(|b| entry(lexicon, b, WordClass::Native)).collect();
    let mut posts = Vec::new();
    for a in 0..authors {
        let author = format!("pa{a:05}");
        let region = Region::ALL[rng.gen_range(0..Region::ALL.len())];
        let bin = [PlantedBin::Low, PlantedBin::Medium, PlantedBin::High][rng.gen_range(0..3)];
        let location = location_for(region, &mut rng);
        let english = match bin {
            PlantedBin::High => 0,
            PlantedBin::Medium => 4,
            PlantedBin::Low => 16,
        };
        let mut texts: Vec<String> = Vec::new();
        for _ in 0..records_per_author {
            let hashtag = rng.gen_bool(0.3);
            let mention = rng.gen_bool(0.3);
            let p = 1.0 / (1.0 + (-model.log_odds(hashtag, mention, region, bin)).exp());
            let variant = if rng.gen_bool(p) { Variant::Integrated } else { Variant::Light };
            let e = loanwords[rng.gen_range(0..loanwords.len())];
            let mut text = format!("{} {} {}", filler(&mut rng, ES_FILLER), realize(e, variant, &mut rng), filler(&mut rng, ES_FILLER));
            if mention {
                text = format!("{} {text}", MENTIONS.choose(&mut rng).expect("non-empty"));
            }
            if hashtag {
                text = format!("{text} {}", HASHTAGS.choose(&mut rng).expect("non-empty"));
            }
            texts.push(text);
        }
        for _ in 0..2 {
            let e = natives[rng.gen_range(0..natives.len())];
            let variant = if rng.gen_bool(0.7) { Variant::Integrated } else { Variant::Light };
            texts.push(format!("{} {}", filler(&mut rng, ES_FILLER), realize(e, variant, &mut rng)));
        }
        for _ in 0..english {
            texts.push(format!("{} {}", filler(&mut rng, EN_FILLER), filler(&mut rng, EN_FILLER)));
        }
        texts.shuffle(&mut rng);
        for (k, text) in texts.into_iter().enumerate() {
            let ts = EPOCH + (a as i64) * 60 + (k as i64) * 86_400 * 3;
            posts.push(post(format!("{author}-{k}"), &author, ts, text, false, location));
        }
    }
    posts
}

/// Streams `n` varied posts, about a fifth with a planted verb use.
pub fn write_throughput_corpus(mut out: impl Write, lexicon: &ExpandedLexicon, n: u64, seed: u64) -> io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let mut text = filler(&mut rng, ES_FILLER).to_string();
        if rng.gen_bool(0.2) {
            let e = &lexicon.entries[rng.gen_range(0..lexicon.len())];
            let variant = if rng.gen_bool(0.5) { Variant::Integrated } else { Variant::Light };
            text.push(' ');
            text.push_str(&realize(e, variant, &mut rng));
        }
        text.push(' ');
        text.push_str(filler(&mut rng, ES_FILLER));
        if rng.gen_bool(0.1) {
            text.push(' ');
            text.push_str(HASHTAGS.choose(&mut rng).expect("non-empty"));
        }
        let p = post(format!("t{i}"), &format!("ta{}", i % 50_000), EPOCH + i as i64, text, rng.gen_bool(0.1), None);
        serde_json::to_writer(&mut out, &p)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
