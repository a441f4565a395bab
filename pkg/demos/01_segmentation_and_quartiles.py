"""
Parsing answer bodies and revision pages
========================================

Answer bodies are markdown with fenced code; the library splits them into
prose/code segments that reassemble byte-for-byte. Saved revision-history
pages yield the full version list, and comment counts map onto the four
analysis quartiles.
"""

from autocombat import parse_revision_page, quartile_of, segment_answer

answer = """Use a dictionary lookup:

```python
value = settings.get("timeout", 30)
```

The second argument is the default.
"""

print("Segments:")
for seg in segment_answer(answer):
    info = f" ({seg.fence_info})" if seg.fence_info else ""
    print(f"  {seg.kind.value:>5}{info}: {seg.text!r}")

reassembled = "".join(seg.raw for seg in segment_answer(answer))
print("round-trips exactly:", reassembled == answer)

# A saved revision page: one container, one block per revision.
page = """
<html><body>
<div class="js-revisions">
  <div class="revision">
    <span class="relativetime" title="2019-03-01 09:00:00Z"></span>
    <div class="post-source">Use settings["timeout"].</div>
  </div>
  <div class="revision">
    <span class="relativetime" title="2019-03-02 18:30:00Z"></span>
    <div class="post-source">Use settings.get("timeout", 30).</div>
  </div>
</div>
</body></html>
"""

print("\nRevisions:")
for version in parse_revision_page(page):
    print(f"  r{version.revision_ordinal} @ {version.timestamp:%Y-%m-%d}: {version.body_markdown}")

print("\nQuartile buckets by comment count:")
for count in (1, 2, 5, 13):
    print(f"  {count:>2} comments -> {quartile_of(count).value}")
