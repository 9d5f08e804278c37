count = 0
arr = []
while (count < 4):
    n = int(input("Key in a Number: "))
    arr.append(n)
    count += 1
sum = 0
for i in arr:
    sum = sum + i
print("Sum of the Array is ", sum)
length = len(arr)
print("Length of the Array is ", length)
