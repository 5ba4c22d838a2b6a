// Copyright 2026 The ofclip Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Embedded copy of data/fashion_lexicon.txt. Keep the two in sync; the text
// tests compare them byte for byte.

#pragma once

#include <string_view>

namespace ofclip {

inline constexpr std::string_view kDefaultLexicon = R"LEX(# Closed-class lexicon for caption noun chunking.
# One section per tag; words are whitespace separated. Tokens not listed here
# are tagged as nouns.

[determiner]
a an the this that these those each every some any no all both either neither
another such what which whose my your his her its our their

[preposition]
with without of in on at by for from to into onto over under above below
across along around behind beside between beyond near off through throughout
toward towards upon via within against among during except like unlike per
plus inside outside underneath past about

[conjunction]
and or but nor yet so while whereas although though because if than as

[pronoun]
i me you he him she it we us they them one ones myself yourself itself
themselves someone something anything everything

[verb]
is are was were be been being am has have had having do does did
features featuring feature made make makes comes come fits fit
includes including include pairs pair paired wear wears worn wearing
shows showing looks look offers offering gives give adds add added
designed crafted finished trimmed detailed lined cut styled

[adverb]
very too also just not only really slightly fully partially well almost
extra super highly lightly softly finely

[adjective]
red blue green yellow black white grey gray brown pink purple orange beige
navy ivory cream khaki olive burgundy maroon teal turquoise gold silver
tan camel charcoal coral mint lilac lavender nude multicolor multicolour
dark light bright pale neon pastel metallic matte glossy shiny sheer
long short midi mini maxi cropped oversized slim skinny wide narrow loose
tight fitted relaxed straight flared tapered regular high low mid
small large big tiny little new classic vintage modern casual formal
elegant chic sporty basic plain solid striped checked plaid floral
printed graphic embroidered quilted pleated ruffled ribbed knitted knit
woven padded distressed ripped washed faded stretch soft smooth rough
warm lightweight heavy heavyweight thick thin waterproof breathable
sleeveless strapless backless hooded collared buttoned zipped
round square pointed open closed double single crew
asymmetric asymmetrical symmetrical adjustable removable elasticated elastic
contrast tonal decorative structured unstructured tailored
mens womens unisex kids
)LEX";

}  // namespace ofclip
