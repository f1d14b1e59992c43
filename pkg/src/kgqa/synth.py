"""Deterministic synthetic benchmark for desk-scale end-to-end runs.

Generates a small knowledge graph (about a thousand entities, fifty
relations), templated questions over its facts, a random embedding table,
and train/valid/test splits — everything the CLI needs, in the exact file
formats the loaders consume.  Entity labels are unique so the questions
are unambiguous; every relation is guaranteed at least a few training
questions.
"""

from __future__ import annotations

import random
from pathlib import Path

_FIRST_NAMES = [
    "sasha", "maria", "john", "elena", "peter", "amara", "louis", "ingrid",
    "omar", "lucia", "viktor", "hana", "marco", "priya", "stefan", "alice",
    "bruno", "clara", "diego", "emma", "felix", "greta", "henrik", "iris",
    "jonas", "karin", "leon", "mira", "nils", "olga", "pavel", "rosa",
    "samuel", "tessa", "ulrich", "vera", "walter", "yara", "zoran", "adela",
]
_LAST_NAMES = [
    "vujacic", "moreno", "takada", "lindgren", "okafor", "petrov", "silva",
    "novak", "haugen", "marchetti", "dubois", "kowalski", "fernandez",
    "bergstrom", "castellano", "dimitrov", "eriksen", "fontaine", "gruber",
    "horvat", "ibarra", "jansen", "keller", "lombardi", "meirelles",
    "nakata", "oliveira", "pavlov", "quintero", "rossi", "sorensen",
    "tanaka", "ustinov", "varga", "weiss", "xavier", "yilmaz", "zielinski",
    "almeida", "brandt",
]
_TITLE_ADJECTIVES = [
    "silent", "crimson", "golden", "hollow", "distant", "broken", "hidden",
    "burning", "frozen", "endless", "scarlet", "velvet", "wandering",
    "shattered", "midnight", "forgotten", "rising", "fading", "electric",
    "savage", "gentle", "iron", "paper", "glass", "wild",
]
_FILM_NOUNS = [
    "storm", "harbor", "mirror", "garden", "voyage", "empire", "signal",
    "horizon", "fortress", "carnival", "lantern", "compass", "railway",
    "sparrow", "monsoon", "avenue", "tideland", "pavilion", "meridian",
    "castle",
]
_BOOK_NOUNS = [
    "letters", "chronicle", "testament", "notebook", "atlas", "manifesto",
    "labyrinth", "memoir", "ballad", "almanac", "parable", "inventory",
    "catalogue", "codex",
]
_ALBUM_NOUNS = [
    "echoes", "frequencies", "overture", "reverie", "anthems", "lullabies",
    "voltage", "harmonics", "interlude", "polaroids", "serenade", "static",
]
_BAND_ANIMALS = [
    "wolves", "herons", "foxes", "badgers", "ravens", "otters", "lynxes",
    "falcons", "bisons", "jackals",
]
_SHOW_NOUNS = [
    "precinct", "hospital", "bakery", "courtroom", "lighthouse", "terminal",
    "station", "orchard", "archive", "embassy", "bunker", "newsroom",
]
_TEAM_MASCOTS = [
    "rockets", "pioneers", "comets", "mariners", "stallions", "titans",
    "voyagers", "sentinels", "drifters", "monarchs",
]
_COMPANY_STEMS = [
    "helix", "quantum", "vertex", "apex", "nimbus", "zenith", "cobalt",
    "aurora", "summit", "atlas", "orbit", "pinnacle", "cascade", "beacon",
    "solstice", "meridian", "catalyst", "horizon", "vanguard", "polaris",
    "tundra", "ember", "lattice", "cipher", "delta",
]
_COMPANY_FORMS = ["corporation", "industries", "systems", "labs", "holdings"]
_CITIES = [
    "ljubljana", "springfield", "new york", "los angeles", "buenos aires",
    "rio de janeiro", "salt lake city", "marseille", "bergen", "lagos",
    "osaka", "porto", "krakow", "valencia", "bologna", "zagreb", "tallinn",
    "cork", "adelaide", "windhoek", "monterrey", "cusco", "davao",
    "bandung", "tangier", "odessa", "varna", "ostrava", "santa fe",
    "port louis", "hamilton", "leipzig", "ghent", "aberdeen", "trieste",
    "cali", "mendoza", "aarhus", "turku", "basel", "nantes", "bilbao",
    "palermo", "heidelberg", "gdansk",
]
_COUNTRIES = [
    "slovenia", "argentina", "japan", "norway", "nigeria", "portugal",
    "poland", "spain", "italy", "croatia", "estonia", "ireland",
    "australia", "namibia", "mexico", "peru", "morocco", "ukraine",
    "bulgaria", "denmark", "finland", "switzerland", "france", "germany",
    "canada",
]
_PROFESSIONS = [
    "engineer", "architect", "journalist", "biologist", "composer",
    "sculptor", "economist", "surgeon", "cartographer", "astronomer",
    "chef", "translator", "photographer", "historian", "pilot",
    "illustrator", "geologist", "librarian",
]
_RELIGIONS = [
    "buddhism", "catholicism", "islam", "judaism", "hinduism", "taoism",
    "shinto", "protestantism",
]
_LANGUAGES = [
    "slovene", "spanish", "japanese", "norwegian", "portuguese", "polish",
    "italian", "croatian", "estonian", "french", "german", "finnish",
    "ukrainian", "danish",
]
_UNIVERSITIES = [
    "harwick university", "eastvale university", "crowmont university",
    "redfield university", "ashbourne university", "kingsreach university",
    "dunmore university", "welbeck university", "thornbury university",
    "marcliffe university", "oakhaven university", "brightwater university",
    "stonegate university", "fairmont university", "larkspur university",
    "coldbrook university",
]
_GENRES = [
    "science fiction", "drama", "comedy", "thriller", "documentary",
    "romance", "horror", "western", "animation", "mystery", "jazz",
    "folk", "ambient", "punk",
]
_INSTRUMENTS = [
    "piano", "violin", "cello", "trumpet", "saxophone", "clarinet",
    "accordion", "harp", "oboe", "mandolin", "banjo", "flute",
]
_RATINGS = ["g", "pg", "pg-13", "r", "nc-17"]
_TOPICS = [
    "astronomy", "beekeeping", "cartography", "mythology", "espionage",
    "mountaineering", "archaeology", "navigation", "alchemy", "botany",
    "calligraphy", "falconry",
]
_RELEASE_TYPES = ["studio recording", "live recording", "extended play"]
_TIMEZONES = [
    "central european time", "eastern time", "pacific time",
    "japan standard time", "greenwich mean time", "atlantic time",
    "mountain time", "indochina time",
]
_AIRPORTS = [
    "meridian airport", "arlington field", "northgate airport",
    "silverton airfield", "eastbrook airport", "lakewood field",
    "kestrel airport", "dovercourt airfield", "pinehurst airport",
    "westerly field", "granville airport", "seabright airfield",
    "calder field", "rosewood airport", "hartline airport",
]
_AREA_CODES = [
    "212", "310", "415", "512", "617", "702", "808", "904", "206", "303",
    "404", "503", "602", "713", "816", "901", "312", "407", "505", "619",
]
_INDUSTRIES = [
    "aerospace", "biotechnology", "telecommunications", "shipping",
    "robotics", "insurance", "publishing", "logistics", "agriculture",
    "semiconductors", "tourism", "forestry",
]
_SPORTS = [
    "basketball", "football", "hockey", "baseball", "rugby", "cricket",
    "volleyball", "handball", "lacrosse", "curling",
]
_TROPHIES = [
    "continental cup", "premier trophy", "founders shield", "atlantic cup",
    "summit trophy", "unity cup", "legacy shield", "harbor classic",
    "national pennant", "golden laurel",
]
_COLORS = [
    "navy and gold", "crimson and white", "green and silver",
    "black and orange", "teal and maroon", "purple and grey",
    "scarlet and cream", "blue and copper", "emerald and black",
    "burgundy and steel", "amber and slate", "ivory and royal blue",
]
_STADIUMS = [
    "granite arena", "riverside stadium", "union grounds", "falcon dome",
    "summit park", "harborview arena", "centennial field",
    "ironworks stadium", "beacon coliseum", "northside arena",
    "cedar bowl", "victory park", "linden stadium", "prospect arena",
    "keystone grounds", "silverlake dome", "frontier field",
    "monument park", "gateway arena", "stonebridge stadium",
]
_YEARS = [str(y) for y in range(1951, 2011, 2)]
_NUMBERS = [
    "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve",
]

# relation -> (subject kind, object kind, question templates)
RELATIONS: dict[str, tuple[str, str, list[str]]] = {
    "people/person/place_of_birth": ("person", "city", [
        "where was {} born?",
        "what is the place of birth of {}?",
        "in what city was {} born?",
    ]),
    "people/person/place_of_death": ("person", "city", [
        "where did {} die?",
        "in what city did {} die?",
    ]),
    "people/person/nationality": ("person", "country", [
        "what is the nationality of {}?",
        "what country is {} a citizen of?",
    ]),
    "people/person/profession": ("person", "profession", [
        "what is the profession of {}?",
        "what does {} do for a living?",
    ]),
    "people/person/religion": ("person", "religion", [
        "what religion does {} follow?",
        "what is the religion of {}?",
    ]),
    "people/person/spouse_s": ("person", "person_object", [
        "who is the spouse of {}?",
        "who is {} married to?",
    ]),
    "people/person/education": ("person", "university", [
        "where did {} study?",
        "which university did {} attend?",
    ]),
    "people/person/employment_history": ("person", "company", [
        "which company does {} work for?",
        "who employs {}?",
    ]),
    "people/person/languages": ("person", "language", [
        "what language does {} speak?",
        "which languages can {} speak?",
    ]),
    "music/artist/instruments_played": ("person", "instrument", [
        "what instrument does {} play?",
        "which instrument is {} known for playing?",
    ]),
    "film/film/directed_by": ("film", "person_object", [
        "who directed {}?",
        "who is the director of {}?",
    ]),
    "film/film/written_by": ("film", "person_object", [
        "who wrote the screenplay for {}?",
        "who was the screenwriter of {}?",
    ]),
    "film/film/produced_by": ("film", "person_object", [
        "who produced {}?",
        "who was the producer of {}?",
    ]),
    "film/film/music": ("film", "person_object", [
        "who composed the score for {}?",
        "who did the soundtrack of {}?",
    ]),
    "film/film/genre": ("film", "genre", [
        "what genre is the movie {}?",
        "what kind of film is {}?",
    ]),
    "film/film/country": ("film", "country", [
        "what country was the film {} made in?",
        "where was the movie {} produced?",
    ]),
    "film/film/language": ("film", "language", [
        "what language is the film {} in?",
        "in what language was the movie {} filmed?",
    ]),
    "film/film/rating": ("film", "rating", [
        "what is the rating of the film {}?",
        "how is the movie {} rated?",
    ]),
    "book/written_work/author": ("book", "person_object", [
        "who is the author of {}?",
        "who wrote the book {}?",
    ]),
    "book/written_work/subjects": ("book", "topic", [
        "what is the book {} about?",
        "what subject does {} cover?",
    ]),
    "book/book/genre": ("book", "genre", [
        "what genre is the book {}?",
        "what type of book is {}?",
    ]),
    "book/written_work/original_language": ("book", "language", [
        "what language was the book {} written in?",
    ]),
    "book/written_work/publisher": ("book", "company", [
        "who published {}?",
        "what company published the book {}?",
    ]),
    "book/written_work/date_of_first_publication": ("book", "year", [
        "when was the book {} first published?",
    ]),
    "music/album/artist": ("album", "person_object", [
        "who recorded the album {}?",
        "which artist released {}?",
    ]),
    "music/album/genre": ("album", "genre", [
        "what genre is the album {}?",
    ]),
    "music/album/release_type": ("album", "release_type", [
        "what kind of release is {}?",
    ]),
    "music/album/release_date": ("album", "year", [
        "when was the album {} released?",
        "in what year did the album {} come out?",
    ]),
    "music/artist/origin": ("band", "city", [
        "where is the band {} from?",
        "what city did the band {} form in?",
    ]),
    "music/artist/genre": ("band", "genre", [
        "what genre does the band {} play?",
    ]),
    "tv/tv_program/created_by": ("show", "person_object", [
        "who created the show {}?",
        "who is the creator of the series {}?",
    ]),
    "tv/tv_program/country_of_origin": ("show", "country", [
        "what country is the show {} from?",
    ]),
    "tv/tv_program/genre": ("show", "genre", [
        "what genre is the tv series {}?",
    ]),
    "tv/tv_program/languages": ("show", "language", [
        "what language is the show {} broadcast in?",
    ]),
    "tv/tv_program/number_of_seasons": ("show", "number", [
        "how many seasons does {} have?",
        "how many seasons of {} are there?",
    ]),
    "location/location/containedby": ("city", "country", [
        "what country is {} located in?",
        "which country contains {}?",
    ]),
    "location/location/time_zones": ("city", "timezone", [
        "what time zone is {} in?",
    ]),
    "location/citytown/mayor": ("city", "person_object", [
        "who is the mayor of {}?",
    ]),
    "location/location/nearby_airports": ("city", "airport", [
        "what airport serves {}?",
    ]),
    "location/location/area_code": ("city", "area_code", [
        "what is the area code of {}?",
    ]),
    "organization/organization/founders": ("company", "person_object", [
        "who founded {}?",
        "who is the founder of {}?",
    ]),
    "organization/organization/headquarters": ("company", "city", [
        "where is {} headquartered?",
        "in what city is the headquarters of {}?",
    ]),
    "organization/organization/industry": ("company", "industry", [
        "what industry is {} in?",
    ]),
    "organization/organization/date_founded": ("company", "year", [
        "when was {} founded?",
    ]),
    "business/employer/number_of_employees": ("company", "number", [
        "how many employees does {} have?",
    ]),
    "sports/sports_team/sport": ("team", "sport", [
        "what sport does {} play?",
    ]),
    "sports/sports_team/location": ("team", "city", [
        "what city does {} play in?",
        "where are {} based?",
    ]),
    "sports/sports_team/championships": ("team", "trophy", [
        "what championship did {} win?",
    ]),
    "sports/sports_team/colors": ("team", "color", [
        "what are the colors of {}?",
    ]),
    "sports/sports_team/arena_stadium": ("team", "stadium", [
        "what arena do {} play at?",
        "where do {} play their home games?",
    ]),
}

EXEMPLAR_QUESTION = "where was sasha vujacic born?"
EXEMPLAR_NAME = "sasha vujacic"
EXEMPLAR_RELATION = "people/person/place_of_birth"
EXEMPLAR_MID = "m.00000"  # first registered entity


class _Registry:
    def __init__(self) -> None:
        self.names: dict[str, str] = {}   # mid -> canonical name
        self.by_kind: dict[str, list[str]] = {}
        self._taken: set[str] = set()
        self.aliases: list[tuple[str, str]] = []

    def add(self, kind: str, name: str) -> str | None:
        if name in self._taken:
            return None
        mid = f"m.0{len(self.names):04x}"
        self._taken.add(name)
        self.names[mid] = name
        self.by_kind.setdefault(kind, []).append(mid)
        self.aliases.append((mid, name))
        return mid


def _sample_pairs(rng: random.Random, lefts, rights, count: int) -> list[str]:
    combos = [f"{a} {b}" for a in lefts for b in rights]
    rng.shuffle(combos)
    return combos[:count]


def generate(out_dir: str | Path, seed: int = 0) -> dict[str, Path]:
    """Write the synthetic corpus into ``out_dir``; returns the file map."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    reg = _Registry()

    # Subjects.  The exemplar person comes first so it always exists.
    reg.add("person", EXEMPLAR_NAME)
    for name in _sample_pairs(rng, _FIRST_NAMES, _LAST_NAMES, 320):
        reg.add("person", name)
    for name in _sample_pairs(rng, ["the " + a for a in _TITLE_ADJECTIVES], _FILM_NOUNS, 100):
        reg.add("film", name)
    for name in _sample_pairs(rng, _TITLE_ADJECTIVES, _BOOK_NOUNS, 70):
        reg.add("book", name)
    for name in _sample_pairs(rng, _TITLE_ADJECTIVES, _ALBUM_NOUNS, 60):
        reg.add("album", name)
    for name in _sample_pairs(rng, ["the " + a for a in _TITLE_ADJECTIVES], _BAND_ANIMALS, 40):
        reg.add("band", name)
    for name in _sample_pairs(rng, _TITLE_ADJECTIVES, _SHOW_NOUNS, 50):
        reg.add("show", name)
    for name in _sample_pairs(rng, _COMPANY_STEMS, _COMPANY_FORMS, 50):
        reg.add("company", name)
    team_cities = rng.sample(_CITIES, min(len(_CITIES), 30))
    for name in _sample_pairs(rng, team_cities, _TEAM_MASCOTS, 40):
        reg.add("team", name)

    # Objects (cities double as subjects of the location relations).
    for city in _CITIES:
        reg.add("city", city)
    object_pools = {
        "country": _COUNTRIES, "profession": _PROFESSIONS,
        "religion": _RELIGIONS, "university": _UNIVERSITIES,
        "language": _LANGUAGES, "instrument": _INSTRUMENTS,
        "genre": _GENRES, "rating": _RATINGS, "topic": _TOPICS,
        "release_type": _RELEASE_TYPES, "timezone": _TIMEZONES,
        "airport": _AIRPORTS, "area_code": _AREA_CODES,
        "industry": _INDUSTRIES, "sport": _SPORTS, "trophy": _TROPHIES,
        "color": _COLORS, "stadium": _STADIUMS, "year": _YEARS,
        "number": _NUMBERS,
    }
    for kind, pool in object_pools.items():
        for name in pool:
            reg.add(kind, name)
    for name in _sample_pairs(rng, _FIRST_NAMES, [ln + "son" for ln in _LAST_NAMES[:20]], 60):
        reg.add("person_object", name)

    # A sprinkle of secondary aliases exercises multi-alias code paths.
    for mid in reg.by_kind["person"][1:]:
        if rng.random() < 0.10:
            reg.aliases.append((mid, "dr " + reg.names[mid]))

    relations_by_subject: dict[str, list[str]] = {}
    for relation, (subj_kind, _, _) in RELATIONS.items():
        relations_by_subject.setdefault(subj_kind, []).append(relation)

    def object_for(kind: str) -> str:
        return rng.choice(reg.by_kind[kind])

    triples: list[tuple[str, str, str]] = []
    facts_for_questions: list[tuple[str, str, str]] = []
    for subj_kind, rels in relations_by_subject.items():
        for mid in reg.by_kind[subj_kind]:
            available = list(rels)
            count = rng.randint(max(1, len(available) - 3), len(available))
            chosen = rng.sample(available, count)
            if mid == EXEMPLAR_MID:
                chosen = sorted(set(chosen) | {EXEMPLAR_RELATION})
            for relation in chosen:
                obj = object_for(RELATIONS[relation][1])
                triples.append((mid, relation, obj))
                facts_for_questions.append((mid, relation, obj))

    questions: list[tuple[str, str, str, str]] = []
    for mid, relation, obj in facts_for_questions:
        if rng.random() > 0.55:
            continue
        template = rng.choice(RELATIONS[relation][2])
        questions.append((mid, relation, obj, template.format(reg.names[mid])))
    rng.shuffle(questions)

    n_test = max(1, len(questions) // 5)
    n_valid = max(1, len(questions) // 10)
    test = questions[:n_test]
    valid = questions[n_test:n_test + n_valid]
    train = questions[n_test + n_valid:]

    # Every relation needs training coverage or the classifier can never
    # predict it; pull examples over from the larger splits if needed.
    covered = {q[1] for q in train}
    for relation in RELATIONS:
        if relation in covered:
            continue
        for split in (test, valid):
            hit = next((q for q in split if q[1] == relation), None)
            if hit is not None:
                split.remove(hit)
                train.append(hit)
                covered.add(relation)
                break

    exemplar = (EXEMPLAR_MID, EXEMPLAR_RELATION,
                next(o for s, r, o in triples
                     if s == EXEMPLAR_MID and r == EXEMPLAR_RELATION),
                EXEMPLAR_QUESTION)
    test.append(exemplar)

    paths = {
        "triples": out / "triples.tsv",
        "names": out / "names.tsv",
        "wiki": out / "wiki.txt",
        "train": out / "train.tsv",
        "valid": out / "valid.tsv",
        "test": out / "test.tsv",
        "embeddings": out / "embeddings.txt",
        "config": out / "kgqa.cfg",
    }

    with open(paths["triples"], "w", encoding="utf-8") as fh:
        for s, r, o in triples:
            fh.write(f"{s}\t{r}\t{o}\n")
    with open(paths["names"], "w", encoding="utf-8") as fh:
        for mid, name in reg.aliases:
            fh.write(f"{mid}\t{name}\n")
    with open(paths["wiki"], "w", encoding="utf-8") as fh:
        for mid in reg.names:
            if rng.random() < 0.6:
                fh.write(mid + "\n")
    for split_name in ("train", "valid", "test"):
        rows = {"train": train, "valid": valid, "test": test}[split_name]
        with open(paths[split_name], "w", encoding="utf-8") as fh:
            for s, r, o, text in rows:
                fh.write(f"{s}\t{r}\t{o}\t{text}\n")

    _write_embeddings(paths["embeddings"], reg, questions, rng)
    _write_config(paths, out)
    return paths


def _write_embeddings(path: Path, reg: _Registry, questions, rng: random.Random,
                      dim: int = 300) -> None:
    from .text import tokenize

    vocab: set[str] = set()
    for _, name in reg.aliases:
        vocab.update(tokenize(name))
    for _, _, _, text in questions:
        vocab.update(tokenize(text))
    vocab.update(tokenize(EXEMPLAR_QUESTION))
    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(vocab):
            values = " ".join(f"{rng.gauss(0.0, 0.3):.6f}" for _ in range(dim))
            fh.write(f"{token} {values}\n")


def _write_config(paths: dict[str, Path], out: Path) -> None:
    lines = [
        f"triples={paths['triples']}",
        f"names={paths['names']}",
        f"wiki={paths['wiki']}",
        f"train={paths['train']}",
        f"valid={paths['valid']}",
        f"test={paths['test']}",
        f"embeddings={paths['embeddings']}",
        f"out_dir={out / 'artifacts'}",
        "m=50",
        "r=5",
        "pool_cap=500",
        "crf_epochs=12",
        "rp_epochs=30",
    ]
    paths["config"].write_text("\n".join(lines) + "\n", encoding="utf-8")
