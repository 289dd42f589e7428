"""Calendar-expression patterns shared by the entity tagger and the timex recognizer."""

from __future__ import annotations

import datetime as dt
import re

MONTHS = ["january", "february", "march", "april", "may", "june", "july",
          "august", "september", "october", "november", "december"]
MONTH_ABBR = {m[:3]: i for i, m in enumerate(MONTHS, start=1)}
MONTH_NUM = {m: i for i, m in enumerate(MONTHS, start=1)}
WEEKDAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]
SEASONS = {"spring": "SP", "summer": "SU", "autumn": "FA", "fall": "FA", "winter": "WI"}

_MONTH_RE = r"(?:" + "|".join(m.capitalize() for m in MONTHS) + r"|(?:Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec)\.?)"
_YEAR_RE = r"(?:1[0-9]{3}|20[0-9]{2})"

ISO_DAY = re.compile(r"\b(\d{4})-(\d{2})-(\d{2})\b")
ISO_MONTH = re.compile(r"\b(\d{4})-(\d{2})\b(?!-\d)")
MONTH_DAY_YEAR = re.compile(rf"\b({_MONTH_RE})\s+(\d{{1,2}})(?:st|nd|rd|th)?,?\s+({_YEAR_RE})\b")
DAY_MONTH_YEAR = re.compile(rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({_MONTH_RE})\s+({_YEAR_RE})\b")
MONTH_YEAR = re.compile(rf"\b({_MONTH_RE})\s+(?:of\s+)?({_YEAR_RE})\b")
SEASON_YEAR = re.compile(rf"\b(spring|summer|autumn|fall|winter)\s+(?:of\s+)?({_YEAR_RE})\b", re.IGNORECASE)
MONTH_DAY = re.compile(rf"\b({_MONTH_RE})\s+(\d{{1,2}})(?:st|nd|rd|th)?\b(?!,?\s*\d)")
YEAR = re.compile(rf"(?<![\w$.,-])({_YEAR_RE})(?![\w%]|[.,]\d)")
LONE_MONTH = re.compile(rf"\b({_MONTH_RE})\b")
WEEKDAY = re.compile(r"\b(" + "|".join(w.capitalize() for w in WEEKDAYS) + r")\b")


def month_number(name: str) -> int:
    key = name.lower().rstrip(".")
    return MONTH_NUM.get(key) or MONTH_ABBR[key[:3]]


def safe_date(y, m, d) -> dt.date | None:
    try:
        return dt.date(int(y), int(m), int(d))
    except ValueError:
        return None


def normalize_date_expression(text: str) -> str | None:
    """ISO-style value if ``text`` is exactly one calendar expression, else None.

    Day dates become ``YYYY-MM-DD``, month dates ``YYYY-MM``, bare years ``YYYY``.
    """
    s = " ".join(text.split())
    for pattern, kind in ((ISO_DAY, "iso"), (MONTH_DAY_YEAR, "mdy"), (DAY_MONTH_YEAR, "dmy")):
        m = pattern.fullmatch(s)
        if m:
            if kind == "iso":
                y, mo, d = m.groups()
            elif kind == "mdy":
                mo, d, y = month_number(m.group(1)), m.group(2), m.group(3)
            else:
                d, mo, y = m.group(1), month_number(m.group(2)), m.group(3)
            date = safe_date(y, mo, d)
            return date.isoformat() if date else None
    m = ISO_MONTH.fullmatch(s)
    if m and 1 <= int(m.group(2)) <= 12:
        return f"{m.group(1)}-{m.group(2)}"
    m = MONTH_YEAR.fullmatch(s)
    if m:
        return f"{m.group(2)}-{month_number(m.group(1)):02d}"
    m = re.fullmatch(_YEAR_RE, s)
    if m:
        return s
    return None
