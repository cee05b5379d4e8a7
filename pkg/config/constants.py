from typing import Dict, List, Tuple

# Canonical stage order for a pipeline run
STAGE_ORDER: List[str] = [
    "ingest",
    "ivr",
    "asr",
    "clean",
    "anonymize",
    "extract",
    "embed",
    "index",
    "generate",
    "validate",
]

# CLI subcommand -> stage name
STAGE_COMMANDS: Dict[str, str] = {
    "ingest": "ingest",
    "detect-ivr": "ivr",
    "transcribe": "asr",
    "clean": "clean",
    "anonymize": "anonymize",
    "extract": "extract",
    "embed": "embed",
    "index": "index",
    "generate": "generate",
    "validate": "validate",
}

# PII categories and their placeholder tokens
PLACEHOLDER_TOKENS: Dict[str, str] = {
    "NAME": "<NAME>",
    "ACCOUNT_ID": "<ACCOUNT_ID>",
    "PHONE": "<PHONE>",
    "EMAIL": "<EMAIL>",
    "DOC_ID": "<DOC_ID>",
    "ADDRESS": "<ADDRESS>",
}

# Hesitation markers removed by the cleaning stage
DEFAULT_FILLERS: Dict[str, List[str]] = {
    "pt": ["éh", "eh", "ah", "ahn", "hã", "hum", "hmm", "hm", "uh", "uhm", "né"],
    "en": ["um", "uh", "uhm", "er", "erm", "ah", "hmm", "hm", "mm"],
}

# Numeral lexicons: additive values, multipliers, connectives.
# Singletons listed as ambiguous double as articles and are only
# rewritten when part of a longer numeral run.
NUMERAL_LEXICONS: Dict[str, Dict] = {
    "pt": {
        "values": {
            "zero": 0, "um": 1, "uma": 1, "dois": 2, "duas": 2, "três": 3, "tres": 3,
            "quatro": 4, "cinco": 5, "seis": 6, "sete": 7, "oito": 8, "nove": 9,
            "dez": 10, "onze": 11, "doze": 12, "treze": 13, "catorze": 14, "quatorze": 14,
            "quinze": 15, "dezesseis": 16, "dezessete": 17, "dezoito": 18, "dezenove": 19,
            "vinte": 20, "trinta": 30, "quarenta": 40, "cinquenta": 50, "sessenta": 60,
            "setenta": 70, "oitenta": 80, "noventa": 90,
            "cem": 100, "cento": 100, "duzentos": 200, "duzentas": 200, "trezentos": 300,
            "trezentas": 300, "quatrocentos": 400, "quatrocentas": 400, "quinhentos": 500,
            "quinhentas": 500, "seiscentos": 600, "seiscentas": 600, "setecentos": 700,
            "setecentas": 700, "oitocentos": 800, "oitocentas": 800, "novecentos": 900,
            "novecentas": 900,
        },
        "multipliers": {"mil": 1000},
        "connectives": ["e"],
        "ambiguous_singletons": ["um", "uma"],
    },
    "en": {
        "values": {
            "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
            "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
            "thirteen": 13, "fourteen": 14, "fifteen": 15, "sixteen": 16, "seventeen": 17,
            "eighteen": 18, "nineteen": 19, "twenty": 20, "thirty": 30, "forty": 40,
            "fifty": 50, "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
        },
        "multipliers": {"hundred": 100, "thousand": 1000},
        "connectives": ["and"],
        "ambiguous_singletons": ["one"],
    },
}

# Verbs and question words that mark the customer's request in a clause.
# Each maps to the normalized opening of the rewritten demand and its terminal mark.
INTENT_MARKERS: Dict[str, Dict[str, Tuple[str, str]]] = {
    "pt": {
        "quero": ("Quero", "."), "queria": ("Quero", "."), "gostaria": ("Gostaria", "."),
        "preciso": ("Preciso", "."), "precisava": ("Preciso", "."),
        "desejo": ("Desejo", "."), "desejava": ("Desejo", "."), "solicito": ("Solicito", "."),
        "como": ("Como", "?"), "qual": ("Qual", "?"), "quando": ("Quando", "?"),
        "onde": ("Onde", "?"), "posso": ("Posso", "?"), "poderia": ("Poderia", "?"),
    },
    "en": {
        "want": ("I want", "."), "wanted": ("I want", "."), "need": ("I need", "."),
        "needed": ("I need", "."), "like": ("I would like", "."),
        "how": ("How", "?"), "what": ("What", "?"), "when": ("When", "?"),
        "where": ("Where", "?"), "can": ("Can", "?"), "could": ("Could", "?"),
    },
}

# Function words ignored when measuring content overlap
STOPWORDS: Dict[str, List[str]] = {
    "pt": [
        "a", "o", "as", "os", "um", "uma", "de", "da", "do", "das", "dos", "e", "em", "no",
        "na", "nos", "nas", "por", "para", "pra", "com", "que", "se", "eu", "você", "voce",
        "ele", "ela", "meu", "minha", "seu", "sua", "isso", "esse", "essa", "este", "esta",
        "mas", "ou", "ao", "aos", "já", "não", "nao", "sim", "mais", "muito", "tem", "ter",
        "ser", "está", "esta", "estou", "foi", "vai", "vou", "aqui", "senhor", "senhora",
    ],
    "en": [
        "a", "an", "the", "of", "to", "and", "or", "in", "on", "at", "for", "with", "is",
        "are", "was", "were", "be", "it", "this", "that", "i", "you", "your", "my", "me",
        "we", "our", "can", "will", "would", "do", "does", "have", "has", "not", "so",
    ],
}

# Instruction phrasings used when framing pairs for instruct fine-tuning
DEFAULT_INSTRUCTION_TEMPLATES: List[Tuple[str, str]] = [
    ("customer_query_solution", "Based on the customer's query, what was the recommended solution?"),
    ("customer_ask", "What did the customer ask?"),
    ("agent_recommendation", "What was the agent's recommendation?"),
    ("agent_reply", "Answer the customer's request the way a call-center agent would."),
    ("support_response", "Provide the support response for the following customer demand."),
]

# Default names matched by the NAME dictionary rule
DEFAULT_NAME_DICTIONARY: List[str] = [
    "Ana", "Antônio", "Antonio", "Beatriz", "Bruno", "Camila", "Carla", "Carlos", "Daniel",
    "Eduardo", "Fernanda", "Francisco", "Gabriel", "Gabriela", "Helena", "Isabela", "João",
    "Joao", "José", "Jose", "Juliana", "Larissa", "Lucas", "Luiz", "Marcos", "Maria",
    "Mariana", "Mateus", "Paulo", "Pedro", "Rafael", "Renata", "Ricardo", "Rodrigo",
    "Sandra", "Tiago", "Vanessa", "Silva", "Santos", "Oliveira", "Souza", "Pereira",
    "Ferreira", "Almeida", "Costa", "Rodrigues", "Lima", "Gomes", "Ribeiro",
    "John", "Mary", "Michael", "Sarah", "David", "Jennifer", "Robert", "Linda", "Smith",
    "Johnson", "Williams", "Brown",
]

# Built-in PII rules, same layout as a rule file:
# category <TAB> kind <TAB> payload <TAB> priority
DEFAULT_PII_RULES: List[Tuple[str, str, str, int]] = [
    ("EMAIL", "pattern", r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}", 90),
    ("DOC_ID", "pattern", r"(?<![\d.-])\d{3}[.\s]?\d{3}[.\s]?\d{3}[-.\s]?\d{2}(?![\d-])", 80),
    (
        "ACCOUNT_ID",
        "pattern",
        r"(?i)\b(?:conta|account|cliente|contrato|protocolo|matr[íi]cula)\b"
        r"(?:\s+(?:n[º°o]\.?|number|n[úu]mero))?\s*:?\s*(?P<pii>\d{6,12})\b",
        75,
    ),
    (
        "PHONE",
        "pattern",
        r"(?<![\w-])(?:\+?\d{1,3}[\s.-]?)?(?:\(?\d{2,3}\)?[\s.-]?)?\d{3,5}[\s.-]\d{4}(?![\w-])",
        70,
    ),
    (
        "ADDRESS",
        "pattern",
        r"(?i)\b(?:rua|avenida|av\.|travessa|alameda|rodovia|estrada|street|avenue|road)"
        r"\s+[^\W\d][\w ]{1,40}?,?\s*(?:n[º°o]\.?\s*)?\d{1,5}\b",
        60,
    ),
    ("NAME", "dict", "@builtin", 50),
]

# Artifact file names shared between stages
MANIFEST_FILE = "manifest.json"
RUN_REPORT_FILE = "run_report.json"
INDEX_FILE = "vectors.idx"
DATASET_FILE = "dataset.jsonl"
