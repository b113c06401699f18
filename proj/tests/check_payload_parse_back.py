"""Parses the CLI's generated pages with Python's html.parser, an
implementation independent of the C++ tokenizer, and checks that every
spec value comes back intact."""

import json
import re
import subprocess
import sys
import tempfile
from html.parser import HTMLParser
from pathlib import Path

CORPUS = ["foobar", "'); alert(1);//", "</script><script>x()</script>", "\"><img src=x onerror=y>",
          "a\\b'c\"d`e${f}", "café \U0001F431", "<!-- -->", "&amp;&#39;"]


class Collector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.tags = []
        self.text = {}
        self._open = None

    def handle_starttag(self, tag, attrs):
        self.tags.append((tag, dict(attrs)))
        self._open = len(self.tags) - 1

    def handle_data(self, data):
        if self._open is not None:
            self.text[self._open] = self.text.get(self._open, "") + data

    def handle_endtag(self, tag):
        self._open = None

    def find(self, name):
        return [(i, attrs) for i, (tag, attrs) in enumerate(self.tags) if tag == name]


def parse(path):
    collector = Collector()
    collector.feed(Path(path).read_text(encoding="utf-8"))
    collector.close()
    return collector


def js_literal(escaped):
    # The generator emits only safe ASCII and \uXXXX escapes.
    if re.search(r"\\(?!u[0-9A-Fa-f]{4})", escaped) or "'" in escaped:
        raise ValueError(f"unexpected escape in {escaped!r}")
    raw = re.sub(r"\\u([0-9A-Fa-f]{4})", lambda m: chr(int(m.group(1), 16)), escaped)
    return raw.encode("utf-16", "surrogatepass").decode("utf-16")


def generate(cli, kind, spec, out):
    spec_path = Path(out) / f"{kind}.json"
    spec_path.write_text(json.dumps(spec), encoding="utf-8")
    run = subprocess.run([cli, "gen-payload", kind, "--spec", str(spec_path), "--out", out],
                         capture_output=True, text=True, timeout=30)
    if run.returncode != 0:
        raise RuntimeError(f"gen-payload {kind} exited {run.returncode}: {run.stderr}")


def main():
    cli = sys.argv[1]
    problems = []
    cases = 0
    for value in CORPUS:
        with tempfile.TemporaryDirectory() as out:
            cases += 1
            fields = [["page", value], ["submitType", "3"]]
            generate(cli, "csrf", {"action_url": "http://192.168.0.1/tools_system.htm?a=1&b=2", "fields": fields}, out)
            page = parse(Path(out) / "csrf.html")
            forms = page.find("form")
            inputs = [attrs for _, attrs in page.find("input")]
            if len(forms) != 1 or forms[0][1].get("action") != "http://192.168.0.1/tools_system.htm?a=1&b=2":
                problems.append(f"csrf form action for {value!r}")
            if [[i.get("name"), i.get("value")] for i in inputs] != fields:
                problems.append(f"csrf fields for {value!r}")

            redress = {
                "frame_url": "http://192.168.178.1/cgi-bin/webcm?getpage=x",
                "drop_value": value,
                "decoy_items": [{"label": value, "image_ref": "k.jpg"}, {"label": "b", "image_ref": value}],
                "overlay_boxes": [{"top": 35, "left": 300, "width": 100, "height": 20}],
                "button_overlay": {"top": 195, "left": 425, "label": value},
            }
            generate(cli, "redress", redress, out)
            page = parse(Path(out) / "redress.html")
            imgs = [attrs for _, attrs in page.find("img") if attrs.get("draggable") == "true"]
            if len(imgs) != 2:
                problems.append(f"redress decoy count for {value!r}")
            for img, decoy in zip(imgs, redress["decoy_items"]):
                m = re.fullmatch(r"event\.dataTransfer\.setData\('text/plain', '([^']*)'\)", img.get("ondragstart", ""))
                if not m or js_literal(m.group(1)) != value:
                    problems.append(f"redress drop value for {value!r}")
                if img.get("src") != decoy["image_ref"] or img.get("alt") != decoy["label"]:
                    problems.append(f"redress decoy attributes for {value!r}")
            buttons = page.find("button")
            if len(buttons) != 1 or page.text.get(buttons[0][0]) != value:
                problems.append(f"redress button label for {value!r}")
            frames = page.find("iframe")
            if len(frames) != 1 or frames[0][1].get("src") != redress["frame_url"]:
                problems.append(f"redress iframe for {value!r}")
            if page.find("script"):
                problems.append(f"redress script element for {value!r}")

            tabjack = {"admin_url": "http://192.168.0.1/", "window_name": "w" + value,
                       "evil_url": "http://evil.example/?x=%27"}
            generate(cli, "tabjack", tabjack, out)
            lure = parse(Path(out) / "tabjack_lure.html")
            anchors = lure.find("a")
            if len(anchors) != 1 or anchors[0][1].get("href") != tabjack["admin_url"] \
                    or anchors[0][1].get("target") != tabjack["window_name"]:
                problems.append(f"tabjack lure for {value!r}")
            rebind = parse(Path(out) / "tabjack_rebind.html")
            links = rebind.find("a")
            m = links and re.fullmatch(r"window\.open\('([^']*)', '([^']*)'\); return false;",
                                       links[0][1].get("onclick", ""))
            if not m or js_literal(m.group(1)) != tabjack["evil_url"] or js_literal(m.group(2)) != tabjack["window_name"]:
                problems.append(f"tabjack rebind for {value!r}")

    for problem in problems:
        print(problem)
    print(f"{cases} cases, {len(problems)} problems")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
