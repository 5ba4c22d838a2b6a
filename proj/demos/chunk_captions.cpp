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


// Prints the noun chunks and training prompts for captions given on the
// command line (or a few built-in ones).

#include <cstdio>
#include <string>
#include <vector>

#include "ofclip/prompts.hpp"
#include "ofclip/text.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> captions(argv + 1, argv + argc);
  if (captions.empty()) {
    captions = {"A red cotton dress with long sleeves",
                "Slim fit jeans in washed blue denim, five pockets",
                "the black leather ankle boots"};
  }
  ofclip::SplitMix64 rng(0);
  const auto& tpl = ofclip::PromptTemplate::fashion();
  for (const auto& c : captions) {
    try {
      const std::string chunked = ofclip::chunk_caption(c);
      std::printf("%s\n  chunks: %s\n  prompt: %s\n", c.c_str(), chunked.c_str(),
                  ofclip::render_prompt(tpl, ofclip::sample_prompt(rng, tpl), chunked).c_str());
    } catch (const ofclip::Error& e) {
      std::printf("%s\n  %s\n", c.c_str(), e.what());
    }
  }
  return 0;
}
