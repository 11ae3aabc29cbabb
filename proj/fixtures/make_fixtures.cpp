// Writes the 3x3 worked-example fixture: the nine-pixel image, the generating
// partition, and the window spec used throughout the README walkthroughs.
#include <fstream>

#include "deadleaves/generator.hpp"
#include "deadleaves/json_io.hpp"

using namespace deadleaves;

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ".";
  Image img;
  img.side = 3;
  img.channels = 3;
  const double vals[9][3] = {
      {0.2577, 0.3319, 0.5822}, {0.2571, 0.3444, 0.5866}, {0.2714, 0.7642, 0.7442},
      {0.2688, 0.3927, 0.5983}, {0.5611, 0.2157, 0.6222}, {0.5631, 0.2172, 0.5969},
      {0.2536, 0.3439, 0.5845}, {0.5559, 0.2208, 0.6352}, {0.5406, 0.2098, 0.6082}};
  for (auto& row : vals)
    for (double v : row) img.values.push_back(v);
  write_image_pfm(img, dir + "/example3x3.pfm");

  std::ofstream part(dir + "/example3x3_partition.json");
  part << R"([[[1,1],[2,1],[1,2],[2,2]],[[0,0],[1,0],[0,1],[0,2]],[[2,0]]])" << "\n";
  return 0;
}
