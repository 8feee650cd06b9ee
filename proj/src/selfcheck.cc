namespace ratrw {}
